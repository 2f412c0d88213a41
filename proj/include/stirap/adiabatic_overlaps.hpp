// adiabatic_overlaps.hpp: dressed states of the rotating-frame STIRAP
// Hamiltonian and the |g1>-row matrix elements of the adiabatic propagator
// U2(t, t0) ≈ Σ_m e^{-iα_m(t)} |φ_m(t)><φ_m(t0)| that feed the second-order
// Dyson term.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stirap/pulses_frame.hpp"

namespace stirap {

using Complex = std::complex<double>;

// Sign of the dynamic phase in <ẽ(t)|ẽ(t')>.
//   derived: e^{+i∫_t^{t'} E±}, what U2 = Σ e^{-iα_m}|φ_m(t)><φ_m(t0)| gives.
//   printed: e^{-i∫_t^{t'} E±}, the literal published expression.
// The two coincide when Δ = 0 (E₊ = -E₋, equal weights).
enum class PhaseConvention { derived, printed };

// rho·e^{iθ} for any real rho (std::polar requires rho >= 0).
inline Complex phasor(double rho, double angle) noexcept {
    return {rho * std::cos(angle), rho * std::sin(angle)};
}

inline double phase_sign(PhaseConvention c) noexcept {
    return c == PhaseConvention::derived ? 1.0 : -1.0;
}

// Initial dressed basis used by the adiabatic map. `ideal` pins θ(t0) = 0,
// the counterintuitive limit |0(t0)> = |g1>; `sampled` uses the finite-T
// angles of the grid.
enum class BoundaryBasis { ideal, sampled };

enum class Level : int { g1 = 0, e = 1, g2 = 2 };

enum class DressedIndex : int { plus = 0, zero = 1, minus = 2 };

struct DressedState {
    double c_g1{0.0};
    double c_e{0.0};
    double c_g2{0.0};

    double operator[](Level l) const noexcept {
        switch (l) {
        case Level::g1: return c_g1;
        case Level::e: return c_e;
        case Level::g2: return c_g2;
        }
        return 0.0;
    }

    double dot(const DressedState& o) const noexcept {
        return c_g1 * o.c_g1 + c_e * o.c_e + c_g2 * o.c_g2;
    }

    double norm2() const noexcept { return dot(*this); }
};

struct DressedTriplet {
    DressedState plus;
    DressedState zero;
    DressedState minus;

    const DressedState& operator[](DressedIndex m) const noexcept {
        switch (m) {
        case DressedIndex::plus: return plus;
        case DressedIndex::zero: return zero;
        case DressedIndex::minus: return minus;
        }
        return zero;
    }
};

inline DressedTriplet dressed_states(double theta, double phi) noexcept {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    return {
        {sp * st, cp, sp * ct},
        {ct, 0.0, -st},
        {cp * st, -sp, cp * ct},
    };
}

// ------------------------------------------------------- closed forms --

// <g1|g̃1(t)> = cos θ(t)
inline double overlap_g1_g1tilde(double t, const FrameGeometry& geo) {
    return std::cos(geo.theta_at(t));
}

// <g1|g̃2(t)> = -sin θ(t)
inline double overlap_g1_g2tilde(double t, const FrameGeometry& geo) {
    return -std::sin(geo.theta_at(t));
}

// <ẽ(t)|ẽ(t')>, two-branch phase-weighted sum.
inline Complex overlap_ee(double t, double t_prime, const FrameGeometry& geo,
                          PhaseConvention conv = PhaseConvention::derived) {
    geo.require_inside(t, "overlap_ee");
    geo.require_inside(t_prime, "overlap_ee");
    const double s = phase_sign(conv);
    const double p1 = geo.phi_at(t), p2 = geo.phi_at(t_prime);
    const double dplus = geo.a_plus_at(t_prime) - geo.a_plus_at(t);
    const double dminus = geo.a_minus_at(t_prime) - geo.a_minus_at(t);
    return phasor(std::cos(p1) * std::cos(p2), s * dplus) +
           phasor(std::sin(p1) * std::sin(p2), s * dminus);
}

// ---------------------------------------------------- general adiabatic map --

// Matrix elements of the picture-2 basis vectors |x̃(t)> = U2†(t,t0)|x>
// computed from dressed states and accumulated phases, without the
// closed-form shortcuts. Used to cross-check the closed forms and to build
// Dyson matrix elements term by term.
class AdiabaticMap {
public:
    AdiabaticMap(const FrameGeometry& geo, PhaseConvention conv = PhaseConvention::derived,
                 BoundaryBasis boundary = BoundaryBasis::ideal)
        : geo_(&geo), sign_(phase_sign(conv)) {
        const double theta0 = boundary == BoundaryBasis::ideal ? 0.0 : geo.theta().front();
        initial_ = dressed_states(theta0, geo.phi().front());
    }

    // <g1|x̃(t)> = Σ_m e^{iα_m(t)} <g1|φ_m(t0)> <φ_m(t)|x>
    Complex row_g1(double t, Level x) const {
        const auto now = states_at(t);
        const auto alpha = phases_at(t);
        Complex acc{};
        for (int m = 0; m < 3; ++m) {
            const auto idx = static_cast<DressedIndex>(m);
            acc += phasor(initial_[idx].c_g1 * now[idx][x], sign_ * alpha[m]);
        }
        return acc;
    }

    // <x̃(t)|ỹ(t')> = Σ_m e^{i(α_m(t') - α_m(t))} <x|φ_m(t)> <φ_m(t')|y>
    Complex between(double t, Level x, double t_prime, Level y) const {
        const auto a = states_at(t), b = states_at(t_prime);
        const auto pa = phases_at(t), pb = phases_at(t_prime);
        Complex acc{};
        for (int m = 0; m < 3; ++m) {
            const auto idx = static_cast<DressedIndex>(m);
            acc += phasor(a[idx][x] * b[idx][y], sign_ * (pb[m] - pa[m]));
        }
        return acc;
    }

    const FrameGeometry& geometry() const noexcept { return *geo_; }

private:
    DressedTriplet states_at(double t) const { return dressed_states(geo_->theta_at(t), geo_->phi_at(t)); }

    // α_m in DressedIndex order (plus, zero, minus); E0 = 0, geometric part 0.
    std::array<double, 3> phases_at(double t) const {
        return {geo_->a_plus_at(t), 0.0, geo_->a_minus_at(t)};
    }

    const FrameGeometry* geo_;
    double sign_;
    DressedTriplet initial_;
};

// ------------------------------------------------------ geometric phase --

namespace detail {

using PathPoint = std::array<Complex, 3>;

inline std::vector<PathPoint> dressed_path(const FrameGeometry& geo, DressedIndex m) {
    std::vector<PathPoint> path(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const DressedState d = dressed_states(geo.theta()[i], geo.phi()[i])[m];
        path[i] = {Complex(d.c_g1), Complex(d.c_e), Complex(d.c_g2)};
    }
    return path;
}

// Second-order stencil for f' on a uniform grid: centered inside, one-sided
// at the ends, first order with only two nodes.
template <class F>
auto stencil(F&& f, std::size_t i, std::size_t n, double h) {
    if (n == 2) return (f(1) - f(0)) / h;
    if (i == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (i + 1 == n) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return (f(i + 1) - f(i - 1)) / (2.0 * h);
}

// <φ̇|φ> per node. Re part: ½ d/dt <φ|φ> differenced on the norm;
// Im part: -Im <φ|φ̇> with φ̇ differenced componentwise.
inline std::vector<Complex> connection(std::span<const PathPoint> path, double h) {
    const std::size_t n = path.size();
    std::vector<Complex> out(n);
    if (n < 2) return out;
    auto norm2 = [&](std::size_t j) {
        double acc = 0.0;
        for (const Complex& c : path[j]) acc += std::norm(c);
        return acc;
    };
    for (std::size_t i = 0; i < n; ++i) {
        double im = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const Complex d = stencil([&](std::size_t j) { return path[j][k]; }, i, n, h);
            im += (std::conj(d) * path[i][k]).imag();
        }
        out[i] = Complex(0.5 * stencil(norm2, i, n, h), im);
    }
    return out;
}

} // namespace detail

// max over the grid of |<φ̇_m|φ_m>|; zero for real normalized paths.
inline double geometric_phase_residual(const FrameGeometry& geo, DressedIndex m) {
    double worst = 0.0;
    for (const Complex& a : detail::connection(detail::dressed_path(geo, m), geo.step())) {
        worst = std::max(worst, std::abs(a));
    }
    return worst;
}

// ------------------------------------------------- Dyson matrix elements --

// Which pieces of the picture-2 generator H̄_G(t) to include.
struct GeneratorTerms {
    bool pulse_counter_rotating{true}; // H̄_S^(ω)
    bool bath_rotating{true};          // |g̃><ẽ|σ+, |ẽ><g̃|σ-
    bool bath_counter_rotating{true};  // |g̃><ẽ|σ-, |ẽ><g̃|σ+

    static GeneratorTerms full() { return {}; }
    static GeneratorTerms rwa() { return {false, true, false}; }
};

namespace detail {

enum class BathOp { identity, lower, raise };

// One term c(t) |to~(t)><from~(t)| ⊗ B_k of H̄_G(t).
struct GeneratorTerm {
    Complex coeff;
    Level to;
    Level from;
    BathOp bath;
    std::size_t spin;
};

inline std::vector<GeneratorTerm> generator_terms(double t, const PulseParams& p,
                                                  const SystemBathParams& s,
                                                  const SpinCouplings& couplings,
                                                  const GeneratorTerms& sel) {
    std::vector<GeneratorTerm> out;
    const double nup = s.nu_prime, om = s.omega_bath;
    const std::array<Level, 2> ground{Level::g1, Level::g2};
    const std::array<double, 2> omegas{pulse_omega1(t, p), pulse_omega2(t, p)};
    if (sel.pulse_counter_rotating) {
        for (int m = 0; m < 2; ++m) {
            out.push_back({phasor(omegas[m], -2.0 * nup * t), ground[m], Level::e, BathOp::identity, 0});
            out.push_back({phasor(omegas[m], 2.0 * nup * t), Level::e, ground[m], BathOp::identity, 0});
        }
    }
    for (std::size_t k = 0; k < couplings.size(); ++k) {
        const std::array<double, 2> eta{couplings.to_g1[k], couplings.to_g2[k]};
        for (int m = 0; m < 2; ++m) {
            if (sel.bath_counter_rotating) {
                out.push_back({phasor(eta[m], -(nup + om) * t), ground[m], Level::e, BathOp::lower, k});
                out.push_back({phasor(eta[m], (nup + om) * t), Level::e, ground[m], BathOp::raise, k});
            }
            if (sel.bath_rotating) {
                out.push_back({phasor(eta[m], -(nup - om) * t), ground[m], Level::e, BathOp::raise, k});
                out.push_back({phasor(eta[m], (nup - om) * t), Level::e, ground[m], BathOp::lower, k});
            }
        }
    }
    return out;
}

// <{↓}| B_x B_y |{↓}>
inline double bath_vacuum_pair(const GeneratorTerm& x, const GeneratorTerm& y) noexcept {
    if (x.bath == BathOp::identity && y.bath == BathOp::identity) return 1.0;
    if (x.bath == BathOp::lower && y.bath == BathOp::raise && x.spin == y.spin) return 1.0;
    return 0.0;
}

} // namespace detail

// <{↓}|<g1| H̄_G(w) |g1>|{↓}>
inline Complex first_order_element(double w, const AdiabaticMap& map, const SystemBathParams& s,
                                   const GeneratorTerms& sel = GeneratorTerms::full()) {
    const auto& geo = map.geometry();
    const auto terms = detail::generator_terms(w, geo.pulses(), s, SpinCouplings::from(s), sel);
    Complex acc{};
    for (const auto& x : terms) {
        if (x.bath != detail::BathOp::identity) continue; // <↓|σ±|↓> = 0
        acc += x.coeff * map.row_g1(w, x.to) * std::conj(map.row_g1(w, x.from));
    }
    return acc;
}

// <{↓}|<g1| H̄_G(w) H̄_G(w') |g1>|{↓}>, summed term by term.
inline Complex second_order_element(double w, double w_prime, const AdiabaticMap& map,
                                    const SystemBathParams& s,
                                    const GeneratorTerms& sel = GeneratorTerms::full()) {
    const auto& geo = map.geometry();
    const auto couplings = SpinCouplings::from(s);
    const auto tw = detail::generator_terms(w, geo.pulses(), s, couplings, sel);
    const auto twp = detail::generator_terms(w_prime, geo.pulses(), s, couplings, sel);
    Complex acc{};
    for (const auto& x : tw) {
        const Complex left = map.row_g1(w, x.to);
        if (left == Complex{}) continue;
        for (const auto& y : twp) {
            const double bath = detail::bath_vacuum_pair(x, y);
            if (bath == 0.0) continue;
            const Complex mid = map.between(w, x.from, w_prime, y.to);
            const Complex right = std::conj(map.row_g1(w_prime, y.from));
            acc += bath * x.coeff * y.coeff * left * mid * right;
        }
    }
    return acc;
}

} // namespace stirap
