// eigensolver.hpp: lowest eigenpairs of a Hermitian matrix-free operator
//
// Davidson-type Rayleigh–Ritz iteration with thick restart. Without a
// preconditioner the expansion vectors are plain residuals, which makes the
// subspace a restarted block Krylov space.

#pragma once

#include "polaron/linear_op.hpp"

#include <cstdint>

namespace polaron {

struct EigenOptions {
    int num = 2;            // wanted eigenpairs
    int extra = 2;          // guard vectors kept in the search block
    int max_basis = 48;
    int max_iter = 2000;
    double tol = 1e-10;     // on ||A x - theta x|| for unit x
    std::uint64_t seed = 7; // starting block when no guess is given
};

struct EigenResult {
    Eigen::VectorXd values;     // ascending
    Eigen::MatrixXcd vectors;   // unit Euclidean norm columns
    Eigen::VectorXd residuals;
    int iterations = 0;
    int applications = 0;
};

// `precond` (optional) receives the residual and the current Ritz value and
// returns the expansion direction in place.
using Preconditioner = std::function<void(Eigen::VectorXcd& r, double theta)>;

EigenResult lowest_eigenpairs(const LinearOp& op, Eigen::Index dim, const EigenOptions& opts,
                              const Eigen::MatrixXcd& guess = Eigen::MatrixXcd(),
                              const Preconditioner& precond = nullptr);

}  // namespace polaron
