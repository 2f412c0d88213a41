// quadrature.hpp: cumulative composite Simpson on a uniform grid

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stirap::quad {

// Running integral F[i] = ∫_{x0}^{x_i} f on a uniform grid of spacing h.
// Even nodes are composite Simpson over node pairs; odd nodes add the
// three-point half-panel rule (5, 8, -1)/12 to the previous even node,
// so every node carries O(h^4) error. Two nodes fall back to trapezoid.
template <class T>
void cumulative_simpson(std::span<const T> f, double h, std::span<T> out) {
    const std::size_t n = f.size();
    if (out.size() != n) {
        throw std::invalid_argument("cumulative_simpson: output size mismatch");
    }
    if (n == 0) return;
    out[0] = T{};
    if (n == 1) return;
    if (n == 2) {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return;
    }
    const double third = h / 3.0;
    const double twelfth = h / 12.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            out[i] = out[i - 2] + third * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        } else if (i + 1 < n) {
            out[i] = out[i - 1] + twelfth * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        } else {
            out[i] = out[i - 1] + twelfth * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        }
    }
}

template <class T>
std::vector<T> cumulative_simpson(std::span<const T> f, double h) {
    std::vector<T> out(f.size());
    cumulative_simpson<T>(f, h, std::span<T>(out));
    return out;
}

// ∫ over the whole grid with the same rule as the last cumulative node.
template <class T>
T simpson(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) return T{};
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    T acc{};
    const std::size_t even_end = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
        acc += (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    if (even_end != n - 1) {
        acc += (h / 12.0) * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    }
    return acc;
}

} // namespace stirap::quad
