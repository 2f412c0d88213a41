// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stirap {

// Raised when the time grid cannot resolve the fastest phase of the integrand.
class ResolutionError : public std::runtime_error {
public:
    ResolutionError(const std::string& what, std::size_t required_n_grid)
        : std::runtime_error(what), required_n_grid_(required_n_grid) {}

    std::size_t required_n_grid() const noexcept { return required_n_grid_; }

private:
    std::size_t required_n_grid_;
};

// Raised by the exact propagator when the state norm drifts beyond tolerance.
class IntegratorFailure : public std::runtime_error {
public:
    IntegratorFailure(const std::string& what, double norm_drift, std::size_t steps)
        : std::runtime_error(what), norm_drift_(norm_drift), steps_(steps) {}

    double norm_drift() const noexcept { return norm_drift_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double norm_drift_;
    std::size_t steps_;
};

} // namespace stirap
