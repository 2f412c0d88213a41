// perturbative_efficiency.hpp: second-order transfer efficiency
//
//   P(T) ≈ 1 - 2 η² Λ Re J(T)
//   J(T) = ∫_{t0}^{T} dw ∫_{t0}^{w} dw' <ẽ(w)|ẽ(w')> e^{i(ν'+ω)(w'-w)} c(w) c(w')
//   c(w) = cos θ(w) - r_η sin θ(w)
//
// Each branch b ∈ {+, -} of the kernel separates as g_b(w)·h_b(w') with
// h_b = conj(g_b), so the triangular double integral is a cumulative
// integral nested inside a second one: O(N) instead of O(N²).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stirap/adiabatic_overlaps.hpp"
#include "stirap/errors.hpp"
#include "stirap/pulses_frame.hpp"
#include "stirap/quadrature.hpp"

namespace stirap {

struct QuadratureOptions {
    double samples_per_period{10.0};
    PhaseConvention convention{PhaseConvention::derived};
    bool enforce_resolution{true};
};

struct EfficiencyResult {
    Complex j{};            // J(T), units of τ²
    double correction{0.0}; // 2 η² Λ Re J(T)
    double efficiency{1.0}; // 1 - correction
    bool valid{true};       // |correction| <= 0.5
    std::size_t n_grid{0};
    PulseParams pulses;
    SystemBathParams system;

    double two_re_j() const noexcept { return 2.0 * j.real(); }
};

inline constexpr double kValidityLimit = 0.5;

struct IntegrandFactors {
    std::vector<Complex> g_plus, g_minus, h_plus, h_minus;
};

// Largest Ω_L(t) over the protocol window: dense sampling plus a golden
// section refinement around the best sample.
inline double peak_omega_l(const PulseParams& p) {
    constexpr int samples = 4096;
    const double h = (p.t_end - p.t_start) / samples;
    double best_t = p.t_start, best = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = p.t_start + h * i;
        const double v = omega_l(t, p);
        if (v > best) { best = v; best_t = t; }
    }
    double a = std::max(p.t_start, best_t - h), b = std::min(p.t_end, best_t + h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (omega_l(c, p) > omega_l(d, p)) b = d; else a = c;
    }
    return std::max(best, omega_l(0.5 * (a + b), p));
}

// Fastest phase rate of the integrand: |ν' + ω| plus the largest |E±|.
inline double integrand_max_frequency(const PulseParams& p, const SystemBathParams& s) {
    const Eigenvalues ev = eigenvalues_from(peak_omega_l(p), s.delta());
    return std::abs(s.nu_prime + s.omega_bath) + std::max(std::abs(ev.e_plus), std::abs(ev.e_minus));
}

inline std::size_t required_n_grid(const PulseParams& p, const SystemBathParams& s, double samples_per_period) {
    if (!(samples_per_period > 0.0)) throw std::invalid_argument("samples_per_period must be > 0");
    const double f = integrand_max_frequency(p, s);
    if (f <= 0.0) return 2;
    const double h_max = 2.0 * std::numbers::pi / (samples_per_period * f);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((p.t_end - p.t_start) / h_max)) + 1);
}

inline void check_resolution(const PulseParams& p, const SystemBathParams& s, std::size_t n_grid,
                             const QuadratureOptions& opts) {
    if (!opts.enforce_resolution) return;
    const std::size_t need = required_n_grid(p, s, opts.samples_per_period);
    if (n_grid < need) {
        throw ResolutionError("grid under-resolves the integrand phase: n_grid = " + std::to_string(n_grid) +
                                  ", required n_grid >= " + std::to_string(need),
                              need);
    }
}

inline void check_resolution(const FrameGeometry& geo, const SystemBathParams& s, const QuadratureOptions& opts) {
    check_resolution(geo.pulses(), s, geo.size(), opts);
}

namespace detail {

// g_b(w) = weight_b(w) · coupling(w) · e^{-i[σ A_b(w) + (ν'+ω) w]}
template <class Coupling>
void branch_factors(const FrameGeometry& geo, const SystemBathParams& s, PhaseConvention conv,
                    Coupling&& coupling, std::vector<Complex>& g_plus, std::vector<Complex>& g_minus) {
    const std::size_t n = geo.size();
    const double sigma = phase_sign(conv);
    const double f = s.nu_prime + s.omega_bath;
    g_plus.resize(n);
    g_minus.resize(n);
    const auto t = geo.grid();
    const auto phi = geo.phi();
    const auto ap = geo.a_plus();
    const auto am = geo.a_minus();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = coupling(i);
        const double ft = f * t[i];
        g_plus[i] = phasor(std::cos(phi[i]) * c, -(sigma * ap[i] + ft));
        g_minus[i] = phasor(std::sin(phi[i]) * c, -(sigma * am[i] + ft));
    }
}

// Running ∫_{t0}^{t_i} g(w) ∫_{t0}^{w} conj(g(w')) dw' dw, accumulated into out.
inline void accumulate_branch(std::span<const Complex> g, double h, std::vector<Complex>& scratch,
                              std::vector<Complex>& inner, std::span<Complex> out) {
    const std::size_t n = g.size();
    scratch.resize(n);
    inner.resize(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = std::conj(g[i]);
    quad::cumulative_simpson<Complex>(scratch, h, inner);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = g[i] * inner[i];
    quad::cumulative_simpson<Complex>(scratch, h, inner);
    for (std::size_t i = 0; i < n; ++i) out[i] += inner[i];
}

} // namespace detail

inline IntegrandFactors integrand_factors(const FrameGeometry& geo, const SystemBathParams& s,
                                          PhaseConvention conv = PhaseConvention::derived) {
    IntegrandFactors f;
    const auto theta = geo.theta();
    detail::branch_factors(
        geo, s, conv, [&](std::size_t i) { return std::cos(theta[i]) - s.r_eta * std::sin(theta[i]); },
        f.g_plus, f.g_minus);
    f.h_plus.resize(geo.size());
    f.h_minus.resize(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
        f.h_plus[i] = std::conj(f.g_plus[i]);
        f.h_minus[i] = std::conj(f.g_minus[i]);
    }
    return f;
}

// J(t_i) for every grid node; J(t0) = 0.
inline std::vector<Complex> compute_J_profile(const FrameGeometry& geo, const SystemBathParams& s,
                                              const QuadratureOptions& opts = {}) {
    check_resolution(geo, s, opts);
    std::vector<Complex> gp, gm, scratch, inner;
    const auto theta = geo.theta();
    detail::branch_factors(
        geo, s, opts.convention,
        [&](std::size_t i) { return std::cos(theta[i]) - s.r_eta * std::sin(theta[i]); }, gp, gm);
    std::vector<Complex> out(geo.size());
    detail::accumulate_branch(gp, geo.step(), scratch, inner, out);
    detail::accumulate_branch(gm, geo.step(), scratch, inner, out);
    return out;
}

inline Complex compute_J(const FrameGeometry& geo, const SystemBathParams& s,
                         const QuadratureOptions& opts = {}) {
    return compute_J_profile(geo, s, opts).back();
}

// J with explicit per-spin couplings, not assumed proportional between the
// two transitions. Already carries the η² factors: P ≈ 1 - 2 Re J_η.
inline Complex compute_J_per_spin(const FrameGeometry& geo, const SystemBathParams& s,
                                  const SpinCouplings& couplings, const QuadratureOptions& opts = {}) {
    if (couplings.to_g1.size() != couplings.to_g2.size()) {
        throw std::invalid_argument("compute_J_per_spin: coupling lists differ in length");
    }
    check_resolution(geo, s, opts);
    const auto theta = geo.theta();
    std::vector<Complex> gp, gm, scratch, inner;
    std::vector<Complex> out(geo.size());
    for (std::size_t k = 0; k < couplings.size(); ++k) {
        const double e1 = couplings.to_g1[k], e2 = couplings.to_g2[k];
        if (e1 == 0.0 && e2 == 0.0) continue;
        detail::branch_factors(
            geo, s, opts.convention,
            [&](std::size_t i) { return e1 * std::cos(theta[i]) - e2 * std::sin(theta[i]); }, gp, gm);
        detail::accumulate_branch(gp, geo.step(), scratch, inner, out);
        detail::accumulate_branch(gm, geo.step(), scratch, inner, out);
    }
    return out.back();
}

inline EfficiencyResult efficiency_from_J(Complex j, const PulseParams& p, const SystemBathParams& s,
                                          std::size_t n_grid) {
    EfficiencyResult r;
    r.j = j;
    r.correction = 2.0 * s.eta * s.eta * s.Lambda() * j.real();
    r.efficiency = 1.0 - r.correction;
    r.valid = std::abs(r.correction) <= kValidityLimit;
    r.n_grid = n_grid;
    r.pulses = p;
    r.system = s;
    return r;
}

inline EfficiencyResult perturbative_efficiency(const FrameGeometry& geo, const SystemBathParams& s,
                                                const QuadratureOptions& opts = {}) {
    s.validate();
    if (geo.delta() != s.delta()) {
        throw std::invalid_argument("perturbative_efficiency: geometry built for a different detuning");
    }
    return efficiency_from_J(compute_J(geo, s, opts), geo.pulses(), s, geo.size());
}

inline EfficiencyResult perturbative_efficiency(const PulseParams& p, const SystemBathParams& s,
                                                std::size_t n_grid, const QuadratureOptions& opts = {}) {
    s.validate();
    const FrameGeometry geo = build_frame_geometry(p, s, n_grid);
    return perturbative_efficiency(geo, s, opts);
}

} // namespace stirap
