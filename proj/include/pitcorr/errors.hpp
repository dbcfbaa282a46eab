#pragma once

#include <stdexcept>
#include <string>

namespace pitcorr {

/// Invalid user-facing configuration (scenario files, CLI flags, shape data).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced by a time step.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inner iterations exceeded their cap.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}
    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Numerical failure in a factorization or solver setup.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pitcorr
