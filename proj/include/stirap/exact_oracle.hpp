// exact_oracle.hpp: brute-force Schrödinger propagation of the three-level
// system plus L bath spins on the 3·2^L product space.
//
// Basis ordering: index = level · 2^L + bits, level ∈ {g1, e, g2}, spin k is
// bit k of `bits` (0 = ↓, 1 = ↑).
//
// Lab frame:
//   H = ν|e><e| + Σ_m Ω_m(t)(e^{iν't} + e^{-iν't})(|g_m><e| + h.c.)
//       + Σ_k ω/2 σ_z^k + Σ_{m,k} η_k^m (|g_m><e| + h.c.) ⊗ σ_x^k
// Picture 1 (rotating with ν'|e><e| + H_B):
//   H̃ = Δ|e><e| + Σ_m Ω_m(t)(1 + e^{-2iν't})|g_m><e| + h.c.
//       + Σ_{m,k} η_k^m (|g_m><e| e^{-iν't} + h.c.) ⊗ (σ_-^k e^{-iωt} + σ_+^k e^{iωt})
// The lab drive is normalized so that picture 1 has rotating amplitude Ω_m.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "stirap/adiabatic_overlaps.hpp"
#include "stirap/errors.hpp"
#include "stirap/pulses_frame.hpp"

namespace stirap {

enum class InteractionMode { full, rwa, closed };
enum class Frame { lab, picture1 };

struct OracleConfig {
    InteractionMode mode{InteractionMode::full};
    Frame frame{Frame::picture1};
    double steps_per_period{1024.0}; // RK4 steps per fastest period
    bool pulse_counter_rotating{true};
    double norm_tolerance{1e-9};
    double dt{0.0}; // 0 → chosen from steps_per_period
};

inline constexpr std::size_t kMaxOracleSpins = 12;

class StateVector {
public:
    StateVector() = default;

    explicit StateVector(std::size_t n_spins) : n_spins_(n_spins) {
        if (n_spins > kMaxOracleSpins) {
            throw std::invalid_argument("StateVector: at most " + std::to_string(kMaxOracleSpins) + " spins");
        }
        amp_.assign(3 * (std::size_t{1} << n_spins), Complex{});
    }

    // |level>|bits>
    static StateVector basis(std::size_t n_spins, Level level, std::uint32_t bits = 0) {
        StateVector v(n_spins);
        v[v.index(level, bits)] = 1.0;
        return v;
    }

    // |g1>|{↓}>
    static StateVector ground(std::size_t n_spins) { return basis(n_spins, Level::g1, 0); }

    std::size_t spins() const noexcept { return n_spins_; }
    std::size_t bath_dim() const noexcept { return std::size_t{1} << n_spins_; }
    std::size_t size() const noexcept { return amp_.size(); }

    std::size_t index(Level level, std::uint32_t bits) const noexcept {
        return static_cast<std::size_t>(level) * bath_dim() + bits;
    }

    Complex& operator[](std::size_t i) noexcept { return amp_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return amp_[i]; }
    Complex& at(Level level, std::uint32_t bits) noexcept { return amp_[index(level, bits)]; }
    const Complex& at(Level level, std::uint32_t bits) const noexcept { return amp_[index(level, bits)]; }

    std::vector<Complex>& amplitudes() noexcept { return amp_; }
    const std::vector<Complex>& amplitudes() const noexcept { return amp_; }

    double norm2() const noexcept {
        double acc = 0.0;
        for (const auto& a : amp_) acc += std::norm(a);
        return acc;
    }

private:
    std::size_t n_spins_{0};
    std::vector<Complex> amp_;
};

// ---------------------------------------------------------------- model --

// Time-independent data for H(t) application; holds the per-spin couplings.
class OracleModel {
public:
    OracleModel(const PulseParams& p, const SystemBathParams& s, const OracleConfig& cfg)
        : pulses_(p), system_(s), cfg_(cfg), couplings_(SpinCouplings::from(s)) {
        p.validate();
        s.validate();
        if (s.L() > kMaxOracleSpins) {
            throw std::invalid_argument("OracleModel: L > " + std::to_string(kMaxOracleSpins) + " not supported");
        }
    }

    std::size_t spins() const noexcept { return system_.L(); }
    const OracleConfig& config() const noexcept { return cfg_; }
    const PulseParams& pulses() const noexcept { return pulses_; }
    const SystemBathParams& system() const noexcept { return system_; }

    bool bath_on() const noexcept { return cfg_.mode != InteractionMode::closed; }
    bool counter_rotating_on() const noexcept { return cfg_.mode == InteractionMode::full; }

    // Upper bound on ‖H(t)‖ plus the fastest explicit modulation frequency.
    double max_frequency() const noexcept {
        const double nup = system_.nu_prime, om = system_.omega_bath;
        const double cr = cfg_.pulse_counter_rotating ? 2.0 : 1.0;
        double bound = std::numbers::sqrt2 * pulses_.omega0 * cr;
        if (bath_on()) {
            for (std::size_t k = 0; k < couplings_.size(); ++k) {
                bound += 2.0 * (std::abs(couplings_.to_g1[k]) + std::abs(couplings_.to_g2[k]));
            }
        }
        double modulation = 0.0;
        if (cfg_.frame == Frame::lab) {
            bound += std::abs(system_.nu) + 0.5 * std::abs(om) * static_cast<double>(spins());
            modulation = std::abs(nup);
        } else {
            bound += std::abs(system_.delta());
            if (cfg_.pulse_counter_rotating) modulation = std::max(modulation, 2.0 * std::abs(nup));
            if (bath_on()) modulation = std::max(modulation, std::abs(nup - om));
            if (counter_rotating_on()) modulation = std::max(modulation, std::abs(nup + om));
        }
        return bound + modulation;
    }

    // out = H(t) in. `out` is resized as needed.
    void apply(double t, const StateVector& in, StateVector& out) const {
        if (in.spins() != spins()) {
            throw std::invalid_argument("hamiltonian_apply: state has " + std::to_string(in.spins()) +
                                        " spins, model has " + std::to_string(spins()));
        }
        if (out.spins() != spins() || out.size() != in.size()) out = StateVector(spins());

        const double nup = system_.nu_prime, om = system_.omega_bath;
        const bool lab = cfg_.frame == Frame::lab;
        const double o1 = pulse_omega1(t, pulses_), o2 = pulse_omega2(t, pulses_);

        // <g_m|H|e> pulse factors
        Complex drive;
        if (lab) {
            drive = std::polar(1.0, nup * t);
            if (cfg_.pulse_counter_rotating) drive += std::polar(1.0, -nup * t);
        } else {
            drive = 1.0;
            if (cfg_.pulse_counter_rotating) drive += std::polar(1.0, -2.0 * nup * t);
        }
        const Complex a1 = o1 * drive, a2 = o2 * drive;
        const Complex a1c = std::conj(a1), a2c = std::conj(a2);

        // <g,↓k|H|e,↑k> (counter-rotating) and <g,↑k|H|e,↓k> (rotating) phases
        const Complex lower_cr = lab ? Complex(1.0) : std::polar(1.0, -(nup + om) * t);
        const Complex raise_rot = lab ? Complex(1.0) : std::polar(1.0, -(nup - om) * t);
        const Complex lower_cr_c = std::conj(lower_cr), raise_rot_c = std::conj(raise_rot);

        const double diag_e = lab ? system_.nu : system_.delta();
        const std::size_t nb = in.bath_dim();
        const std::size_t L = spins();
        const bool bath = bath_on();
        const bool cr = counter_rotating_on();

        const Complex* ig1 = in.amplitudes().data();
        const Complex* ie = ig1 + nb;
        const Complex* ig2 = ie + nb;
        Complex* og1 = out.amplitudes().data();
        Complex* oe = og1 + nb;
        Complex* og2 = oe + nb;

        for (std::size_t b = 0; b < nb; ++b) {
            double spin_energy = 0.0;
            if (lab) {
                const int up = std::popcount(static_cast<std::uint32_t>(b));
                spin_energy = 0.5 * om * static_cast<double>(2 * up - static_cast<int>(L));
            }
            Complex rg1 = spin_energy * ig1[b] + a1 * ie[b];
            Complex rg2 = spin_energy * ig2[b] + a2 * ie[b];
            Complex re = (spin_energy + diag_e) * ie[b] + a1c * ig1[b] + a2c * ig2[b];

            if (bath) {
                for (std::size_t k = 0; k < L; ++k) {
                    const std::size_t flip = b ^ (std::size_t{1} << k);
                    const double e1 = couplings_.to_g1[k], e2 = couplings_.to_g2[k];
                    if (((b >> k) & 1U) == 0U) {
                        // target spin k down, source up
                        if (cr) {
                            rg1 += e1 * lower_cr * ie[flip];
                            rg2 += e2 * lower_cr * ie[flip];
                        }
                        re += raise_rot_c * (e1 * ig1[flip] + e2 * ig2[flip]);
                    } else {
                        rg1 += e1 * raise_rot * ie[flip];
                        rg2 += e2 * raise_rot * ie[flip];
                        if (cr) re += lower_cr_c * (e1 * ig1[flip] + e2 * ig2[flip]);
                    }
                }
            }
            og1[b] = rg1;
            oe[b] = re;
            og2[b] = rg2;
        }
    }

private:
    PulseParams pulses_;
    SystemBathParams system_;
    OracleConfig cfg_;
    SpinCouplings couplings_;
};

inline StateVector hamiltonian_apply(double t, const StateVector& psi, const PulseParams& p,
                                     const SystemBathParams& s, const OracleConfig& cfg) {
    StateVector out(psi.spins());
    OracleModel(p, s, cfg).apply(t, psi, out);
    return out;
}

// ----------------------------------------------------------- propagation --

struct PropagationResult {
    StateVector state;
    double max_norm_drift{0.0};
    std::size_t steps{0};
    double dt{0.0};
};

using StepObserver = std::function<void(double t, const StateVector& psi)>;

inline double oracle_step(const OracleModel& model) {
    const double window = model.pulses().t_end - model.pulses().t_start;
    const double period = 2.0 * std::numbers::pi / model.max_frequency();
    const double dt_max = period / model.config().steps_per_period;
    double dt = model.config().dt > 0.0 ? model.config().dt : dt_max;
    if (dt > period / 20.0) {
        throw std::invalid_argument("OracleConfig: dt exceeds 1/20 of the fastest period");
    }
    const double n = std::ceil(window / dt);
    return window / n;
}

// Fixed-step classical RK4 from t_start to t_end.
inline PropagationResult evolve(const StateVector& initial, const OracleModel& model,
                                const StepObserver& observer = {}) {
    const double t0 = model.pulses().t_start;
    const double t1 = model.pulses().t_end;
    const double dt = oracle_step(model);
    const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));

    const std::size_t L = model.spins();
    StateVector psi = initial;
    StateVector k1(L), k2(L), k3(L), k4(L), tmp(L);
    auto& y = psi.amplitudes();
    const std::size_t n = y.size();
    const Complex mi(0.0, -1.0);

    const double norm0 = psi.norm2();
    double worst = 0.0;
    if (observer) observer(t0, psi);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = t0 + dt * static_cast<double>(step);
        model.apply(t, psi, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + (0.5 * dt) * mi * k1[i];
        model.apply(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + (0.5 * dt) * mi * k2[i];
        model.apply(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * mi * k3[i];
        model.apply(t + dt, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += (dt / 6.0) * mi * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        worst = std::max(worst, std::abs(psi.norm2() - norm0));
        if (observer) observer(t + dt, psi);
    }
    if (worst > model.config().norm_tolerance) {
        throw IntegratorFailure("exact oracle: norm drift " + std::to_string(worst) + " exceeds tolerance after " +
                                    std::to_string(steps) + " steps (dt = " + std::to_string(dt) + ")",
                                worst, steps);
    }
    return {std::move(psi), worst, steps, dt};
}

inline PropagationResult propagate_detailed(const PulseParams& p, const SystemBathParams& s,
                                            const OracleConfig& cfg) {
    const OracleModel model(p, s, cfg);
    return evolve(StateVector::ground(s.L()), model);
}

// |ψ(T)> from |g1>|{↓}>
inline StateVector propagate(const PulseParams& p, const SystemBathParams& s, const OracleConfig& cfg) {
    return propagate_detailed(p, s, cfg).state;
}

// ----------------------------------------------------------- observables --

inline double level_population(const StateVector& psi, Level level) noexcept {
    double acc = 0.0;
    for (std::size_t b = 0; b < psi.bath_dim(); ++b) acc += std::norm(psi.at(level, static_cast<std::uint32_t>(b)));
    return acc;
}

// tr[ρ |g2><g2| ⊗ 1_B]
inline double transfer_efficiency(const StateVector& psi) noexcept {
    return level_population(psi, Level::g2);
}

// Population of `level` with exactly `flips` bath spins up.
inline double sector_population(const StateVector& psi, Level level, int flips) noexcept {
    double acc = 0.0;
    for (std::size_t b = 0; b < psi.bath_dim(); ++b) {
        if (std::popcount(static_cast<std::uint32_t>(b)) == flips) {
            acc += std::norm(psi.at(level, static_cast<std::uint32_t>(b)));
        }
    }
    return acc;
}

// <|e><e| + Σ_k n_k^↑>
inline double excitation_number(const StateVector& psi) noexcept {
    double acc = level_population(psi, Level::e);
    for (int l = 0; l < 3; ++l) {
        for (std::size_t b = 0; b < psi.bath_dim(); ++b) {
            acc += std::popcount(static_cast<std::uint32_t>(b)) *
                   std::norm(psi.at(static_cast<Level>(l), static_cast<std::uint32_t>(b)));
        }
    }
    return acc;
}

} // namespace stirap
