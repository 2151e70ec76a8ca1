#pragma once

#include <stdexcept>
#include <string>

namespace polaron {

// Wrong shapes, mismatched grids, bad arguments.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A structural invariant (symmetry, symplecticity, truncation monitor) failed.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative method stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (last residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace polaron
