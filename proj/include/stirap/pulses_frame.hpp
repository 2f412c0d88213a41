// pulses_frame.hpp: Gaussian STIRAP pulses and the instantaneous dressed-state
// geometry (mixing angles, eigenvalues, accumulated dynamic phases).
//
// Units: times in units of τ, frequencies in units of 1/τ. Nothing in this
// header assumes τ = 1, but the CLI always feeds τ = 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stirap/quadrature.hpp"

namespace stirap {

struct PulseParams {
    double omega0{10.0};  // peak Rabi amplitude
    double tau{1.0};      // pulse center offset / width scale
    double t_start{-5.0}; // protocol start t0 = -T
    double t_end{5.0};    // protocol end T

    static PulseParams symmetric(double omega0, double tau, double T) {
        PulseParams p{omega0, tau, -T, T};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(omega0 > 0.0)) throw std::invalid_argument("PulseParams: omega0 must be > 0");
        if (!(tau > 0.0)) throw std::invalid_argument("PulseParams: tau must be > 0");
        if (t_end != -t_start) throw std::invalid_argument("PulseParams: window must be symmetric, t_end = -t_start");
        if (!(t_end > tau)) throw std::invalid_argument("PulseParams: requires T > tau");
    }
};

struct SystemBathParams {
    double nu{10.0};         // atomic gap ν
    double nu_prime{10.0};   // drive frequency ν'
    double omega_bath{1.0};  // spin frequency ω
    double eta{0.0};         // η = η_1^(1)
    double r_eta{1.0};       // η_1^(2) / η_1^(1)
    std::vector<double> lambda_weights{1.0}; // λ_k, λ_1 = 1

    double delta() const noexcept { return nu - nu_prime; }

    double Lambda() const noexcept {
        return std::accumulate(lambda_weights.begin(), lambda_weights.end(), 0.0,
                               [](double acc, double l) { return acc + l * l; });
    }

    std::size_t L() const noexcept { return lambda_weights.size(); }

    // Set ν' from a detuning so that Δ stays derived.
    void set_detuning(double delta_value) { nu_prime = nu - delta_value; }

    void validate() const {
        if (lambda_weights.empty()) throw std::invalid_argument("SystemBathParams: at least one bath spin required");
        if (lambda_weights.front() != 1.0) throw std::invalid_argument("SystemBathParams: lambda_1 must equal 1");
        if (!std::isfinite(nu) || !std::isfinite(nu_prime) || !std::isfinite(omega_bath) ||
            !std::isfinite(eta) || !std::isfinite(r_eta)) {
            throw std::invalid_argument("SystemBathParams: non-finite parameter");
        }
    }
};

// Per-spin couplings η_k^(1), η_k^(2) to the e<->g1 and e<->g2 transitions.
struct SpinCouplings {
    std::vector<double> to_g1;
    std::vector<double> to_g2;

    static SpinCouplings from(const SystemBathParams& s) {
        SpinCouplings c;
        c.to_g1.reserve(s.L());
        c.to_g2.reserve(s.L());
        for (double l : s.lambda_weights) {
            c.to_g1.push_back(s.eta * l);
            c.to_g2.push_back(s.r_eta * s.eta * l);
        }
        return c;
    }

    std::size_t size() const noexcept { return to_g1.size(); }
};

// ---------------------------------------------------------------- pulses --

// Pump, centered at +τ.
inline double pulse_omega1(double t, const PulseParams& p) noexcept {
    const double x = t / p.tau - 1.0;
    return p.omega0 * std::exp(-x * x);
}

// Stokes, centered at -τ; precedes the pump (counterintuitive order).
inline double pulse_omega2(double t, const PulseParams& p) noexcept {
    const double x = t / p.tau + 1.0;
    return p.omega0 * std::exp(-x * x);
}

inline double omega_l(double t, const PulseParams& p) noexcept {
    const double o1 = pulse_omega1(t, p);
    const double o2 = pulse_omega2(t, p);
    return std::sqrt(o1 * o1 + o2 * o2);
}

// ---------------------------------------------------------- mixing angles --

struct ThetaSample {
    double theta{0.0};
    bool degenerate{false}; // both pulses underflowed to exactly zero
};

inline ThetaSample mixing_theta_sample(double t, const PulseParams& p) noexcept {
    const double o1 = pulse_omega1(t, p);
    const double o2 = pulse_omega2(t, p);
    if (o1 == 0.0 && o2 == 0.0) {
        // Dark-state angle is undefined; take the limit of the nearer endpoint.
        const double mid = 0.5 * (p.t_start + p.t_end);
        return {t <= mid ? 0.0 : std::numbers::pi / 2.0, true};
    }
    return {std::atan2(o1, o2), false};
}

inline double mixing_theta(double t, const PulseParams& p) noexcept {
    return mixing_theta_sample(t, p).theta;
}

// φ = ½ atan2(2Ω_L, Δ) ∈ [0, π/2).
inline double mixing_phi_from(double omega_l_value, double delta) noexcept {
    return 0.5 * std::atan2(2.0 * omega_l_value, delta);
}

inline double mixing_phi(double t, const PulseParams& p, const SystemBathParams& s) noexcept {
    return mixing_phi_from(omega_l(t, p), s.delta());
}

// ------------------------------------------------------------- eigenvalues --

struct Eigenvalues {
    double e0{0.0};
    double e_plus{0.0};
    double e_minus{0.0};
};

// E± = ½[Δ ± √(Δ² + 4Ω_L²)], the smaller-magnitude root taken from the
// product E₊E₋ = -Ω_L² to avoid cancellation.
inline Eigenvalues eigenvalues_from(double omega_l_value, double delta) noexcept {
    const double ol2 = omega_l_value * omega_l_value;
    const double root = std::sqrt(delta * delta + 4.0 * ol2);
    Eigenvalues ev;
    if (delta >= 0.0) {
        ev.e_plus = 0.5 * (delta + root);
        ev.e_minus = ev.e_plus > 0.0 ? -ol2 / ev.e_plus : 0.0;
    } else {
        ev.e_minus = 0.5 * (delta - root);
        ev.e_plus = ev.e_minus < 0.0 ? -ol2 / ev.e_minus : 0.0;
    }
    return ev;
}

inline Eigenvalues eigenvalues(double t, const PulseParams& p, const SystemBathParams& s) noexcept {
    return eigenvalues_from(omega_l(t, p), s.delta());
}

// ----------------------------------------------------------- frame geometry --

// Sampled θ, φ, E± and A±(t) = ∫_{t0}^t E± on a uniform grid. Immutable
// after construction; share freely across threads.
class FrameGeometry {
public:
    FrameGeometry(const PulseParams& p, double delta, std::size_t n_grid)
        : pulses_(p), delta_(delta) {
        if (n_grid < 2) throw std::invalid_argument("build_frame_geometry: n_grid must be >= 2");
        p.validate();
        const std::size_t n = n_grid;
        h_ = (p.t_end - p.t_start) / static_cast<double>(n - 1);
        grid_.resize(n);
        theta_.resize(n);
        phi_.resize(n);
        e_plus_.resize(n);
        e_minus_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = i + 1 == n ? p.t_end : p.t_start + h_ * static_cast<double>(i);
            grid_[i] = t;
            const ThetaSample th = mixing_theta_sample(t, p);
            if (th.degenerate) ++degenerate_samples_;
            theta_[i] = th.theta;
            const double ol = omega_l(t, p);
            phi_[i] = mixing_phi_from(ol, delta);
            const Eigenvalues ev = eigenvalues_from(ol, delta);
            e_plus_[i] = ev.e_plus;
            e_minus_[i] = ev.e_minus;
        }
        a_plus_ = quad::cumulative_simpson<double>(e_plus_, h_);
        a_minus_ = quad::cumulative_simpson<double>(e_minus_, h_);
    }

    std::size_t size() const noexcept { return grid_.size(); }
    double step() const noexcept { return h_; }
    double t0() const noexcept { return grid_.front(); }
    double t_final() const noexcept { return grid_.back(); }
    double delta() const noexcept { return delta_; }
    const PulseParams& pulses() const noexcept { return pulses_; }
    std::size_t degenerate_samples() const noexcept { return degenerate_samples_; }

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> theta() const noexcept { return theta_; }
    std::span<const double> phi() const noexcept { return phi_; }
    std::span<const double> e_plus() const noexcept { return e_plus_; }
    std::span<const double> e_minus() const noexcept { return e_minus_; }
    std::span<const double> a_plus() const noexcept { return a_plus_; }
    std::span<const double> a_minus() const noexcept { return a_minus_; }

    double max_abs_eigenvalue() const noexcept {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            m = std::max({m, std::abs(e_plus_[i]), std::abs(e_minus_[i])});
        }
        return m;
    }

    bool contains(double t) const noexcept { return t >= t0() && t <= t_final(); }

    void require_inside(double t, const char* who) const {
        if (!contains(t)) {
            throw std::invalid_argument(std::string(who) + ": time " + std::to_string(t) +
                                        " outside the sampled window");
        }
    }

    // Off-grid values: the angles are analytic, the phases use cubic Hermite
    // interpolation with E± as the derivative data.
    double theta_at(double t) const { require_inside(t, "theta_at"); return mixing_theta(t, pulses_); }
    double phi_at(double t) const { require_inside(t, "phi_at"); return mixing_phi_from(omega_l(t, pulses_), delta_); }
    double a_plus_at(double t) const { return hermite(t, a_plus_, e_plus_); }
    double a_minus_at(double t) const { return hermite(t, a_minus_, e_minus_); }

private:
    double hermite(double t, const std::vector<double>& a, const std::vector<double>& e) const {
        require_inside(t, "phase interpolation");
        const double x = (t - t0()) / h_;
        std::size_t i = static_cast<std::size_t>(std::floor(x));
        if (i + 1 >= size()) i = size() - 2;
        const double s = x - static_cast<double>(i);
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * a[i] + h10 * h_ * e[i] + h01 * a[i + 1] + h11 * h_ * e[i + 1];
    }

    PulseParams pulses_;
    double delta_{0.0};
    double h_{0.0};
    std::size_t degenerate_samples_{0};
    std::vector<double> grid_, theta_, phi_, e_plus_, e_minus_, a_plus_, a_minus_;
};

inline FrameGeometry build_frame_geometry(const PulseParams& p, const SystemBathParams& s,
                                          std::size_t n_grid) {
    return FrameGeometry(p, s.delta(), n_grid);
}

} // namespace stirap
