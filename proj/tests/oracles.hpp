// Test-side reference implementations, written independently of the library
// code paths they check.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "stirap/adiabatic_overlaps.hpp"
#include "stirap/exact_oracle.hpp"
#include "stirap/pulses_frame.hpp"

namespace oracle {

using Complex = std::complex<double>;

// Weights of node i's running integral under the Simpson / half-panel rule,
// built from the rule description rather than from the library routine.
inline std::vector<double> running_weights(std::size_t i, std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    if (i == 0) return w;
    if (n == 2) {
        w[0] = w[1] = h / 2;
        return w;
    }
    const std::size_t even = i % 2 == 0 ? i : i - 1;
    for (std::size_t k = 0; k + 2 <= even; k += 2) {
        w[k] += h / 3;
        w[k + 1] += 4 * h / 3;
        w[k + 2] += h / 3;
    }
    if (i % 2 == 1) {
        if (i + 1 < n) {
            w[i - 1] += 5 * h / 12;
            w[i] += 8 * h / 12;
            w[i + 1] -= h / 12;
        } else {
            w[i - 2] -= h / 12;
            w[i - 1] += 8 * h / 12;
            w[i] += 5 * h / 12;
        }
    }
    return w;
}

// J(T) = Σ_i Σ_j W_{N-1,i} W_{i,j} K(t_i, t_j) with the kernel
// K(w, w') = Σ_k c_k(w) c_k(w') <ẽ(w)|ẽ(w')> e^{i(ν'+ω)(w'-w)}, evaluated
// directly from the sampled angles and phase differences.
inline Complex double_sum_J(const stirap::FrameGeometry& geo, const stirap::SystemBathParams& s,
                            const stirap::SpinCouplings& couplings, double sign = 1.0) {
    const std::size_t n = geo.size();
    const double h = geo.step();
    const double f = s.nu_prime + s.omega_bath;
    const auto t = geo.grid();
    const auto th = geo.theta();
    const auto ph = geo.phi();
    const auto ap = geo.a_plus();
    const auto am = geo.a_minus();
    std::vector<double> ck(n);
    const auto outer = running_weights(n - 1, n, h);
    Complex total{};
    for (std::size_t i = 0; i < n; ++i) {
        if (outer[i] == 0.0) continue;
        const auto inner = running_weights(i, n, h);
        Complex row{};
        for (std::size_t j = 0; j < n; ++j) {
            if (inner[j] == 0.0) continue;
            double cc = 0.0;
            for (std::size_t k = 0; k < couplings.size(); ++k) {
                const double ci = couplings.to_g1[k] * std::cos(th[i]) - couplings.to_g2[k] * std::sin(th[i]);
                const double cj = couplings.to_g1[k] * std::cos(th[j]) - couplings.to_g2[k] * std::sin(th[j]);
                cc += ci * cj;
            }
            const double dpl = sign * (ap[j] - ap[i]) + f * (t[j] - t[i]);
            const double dmi = sign * (am[j] - am[i]) + f * (t[j] - t[i]);
            const Complex ker = std::cos(ph[i]) * std::cos(ph[j]) * std::polar(1.0, dpl) +
                                std::sin(ph[i]) * std::sin(ph[j]) * std::polar(1.0, dmi);
            row += inner[j] * cc * ker;
        }
        total += outer[i] * row;
    }
    return total;
}

// ----------------------------------------------------------- dense model --

using Matrix = std::vector<std::vector<Complex>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<Complex>(n)); }

inline Matrix identity(std::size_t n) {
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t na = a.size(), nb = b.size();
    Matrix m = zeros(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) m[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
    return m;
}

inline void add(Matrix& m, const Matrix& x, Complex c) {
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[i][j] += c * x[i][j];
}

inline Matrix ket_bra(std::size_t n, std::size_t i, std::size_t j) {
    Matrix m = zeros(n);
    m[i][j] = 1.0;
    return m;
}

// Operator on spin k of an L-spin register; spin k is the k-th least
// significant tensor factor, spin basis (↓, ↑).
inline Matrix on_spin(const Matrix& op, std::size_t k, std::size_t L) {
    Matrix m = identity(1);
    for (std::size_t q = L; q-- > 0;) m = kron(m, q == k ? op : identity(2));
    return m;
}

inline Matrix sigma_plus() { return ket_bra(2, 1, 0); }
inline Matrix sigma_minus() { return ket_bra(2, 0, 1); }
inline Matrix sigma_z() {
    Matrix m = zeros(2);
    m[0][0] = -1.0;
    m[1][1] = 1.0;
    return m;
}

// Dense H(t) assembled from Kronecker products, same model and basis order
// as the library's matrix-free operator.
inline Matrix dense_hamiltonian(double t, const stirap::PulseParams& p, const stirap::SystemBathParams& s,
                                const stirap::OracleConfig& cfg) {
    using stirap::Frame;
    using stirap::InteractionMode;
    const std::size_t L = s.L();
    const std::size_t nb = std::size_t{1} << L;
    const Matrix one_b = identity(nb);
    const Matrix one_s = identity(3);
    Matrix H = zeros(3 * nb);
    const bool lab = cfg.frame == Frame::lab;
    const double nup = s.nu_prime, om = s.omega_bath;
    const std::size_t g[2] = {0, 2};
    const std::size_t e = 1;
    const double omegas[2] = {stirap::pulse_omega1(t, p), stirap::pulse_omega2(t, p)};

    add(H, kron(ket_bra(3, e, e), one_b), lab ? s.nu : s.delta());
    if (lab) {
        for (std::size_t k = 0; k < L; ++k) add(H, kron(one_s, on_spin(sigma_z(), k, L)), 0.5 * om);
    }
    for (int m = 0; m < 2; ++m) {
        Complex amp = lab ? std::polar(1.0, nup * t) : Complex(1.0);
        if (cfg.pulse_counter_rotating) amp += lab ? std::polar(1.0, -nup * t) : std::polar(1.0, -2.0 * nup * t);
        add(H, kron(ket_bra(3, g[m], e), one_b), omegas[m] * amp);
        add(H, kron(ket_bra(3, e, g[m]), one_b), omegas[m] * std::conj(amp));
    }
    if (cfg.mode != InteractionMode::closed) {
        const auto c = stirap::SpinCouplings::from(s);
        const bool cr = cfg.mode == InteractionMode::full;
        for (std::size_t k = 0; k < L; ++k) {
            const Matrix sp = on_spin(sigma_plus(), k, L);
            const Matrix sm = on_spin(sigma_minus(), k, L);
            for (int m = 0; m < 2; ++m) {
                const double eta = m == 0 ? c.to_g1[k] : c.to_g2[k];
                // |g><e| σ+ (rotating) and |g><e| σ- (counter-rotating), plus h.c.
                const Complex rot = lab ? Complex(1.0) : std::polar(1.0, -(nup - om) * t);
                const Complex ctr = lab ? Complex(1.0) : std::polar(1.0, -(nup + om) * t);
                add(H, kron(ket_bra(3, g[m], e), sp), eta * rot);
                add(H, kron(ket_bra(3, e, g[m]), sm), eta * std::conj(rot));
                if (cr) {
                    add(H, kron(ket_bra(3, g[m], e), sm), eta * ctr);
                    add(H, kron(ket_bra(3, e, g[m]), sp), eta * std::conj(ctr));
                }
            }
        }
    }
    return H;
}

inline std::vector<Complex> apply(const Matrix& m, const std::vector<Complex>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

} // namespace oracle
