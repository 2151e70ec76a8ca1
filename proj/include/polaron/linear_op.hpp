#pragma once

#include <Eigen/Dense>

#include <functional>

namespace polaron {

// y = A x for a matrix-free operator. Implementations must not alias x and y.
using LinearOp = std::function<void(const Eigen::VectorXcd& x, Eigen::VectorXcd& y)>;

}  // namespace polaron
