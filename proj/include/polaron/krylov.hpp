// krylov.hpp: exp(-i H t) v for Hermitian matrix-free H
//
// Lanczos with full reorthogonalization. Each substep uses the standard
// a posteriori estimate beta_m |[exp(-i T dt) e_1]_m|; a substep whose estimate
// exceeds its share of the tolerance is halved and retried.

#pragma once

#include "polaron/linear_op.hpp"

namespace polaron {

struct KrylovOptions {
    int krylov_dim = 30;
    double tol = 1e-12;      // total error budget per unit time, relative to ||v||
    double max_step = 1e30;  // upper bound on a single substep
};

struct KrylovStats {
    int substeps = 0;
    int rejected = 0;
    int applications = 0;
    double error_estimate = 0.0;  // accumulated
};

Eigen::VectorXcd expm_multiply(const LinearOp& H, const Eigen::VectorXcd& v, double t,
                               const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

}  // namespace polaron
