#include "polaron/eigensolver.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <random>

namespace polaron {
namespace {

// Orthogonalize v against the first `cols` columns of basis twice (CGS2);
// returns the remaining norm.
double orthogonalize(const Eigen::MatrixXcd& basis, Eigen::Index cols, Eigen::VectorXcd& v) {
    for (int pass = 0; pass < 2; ++pass) {
        if (cols == 0) break;
        const Eigen::VectorXcd c = basis.leftCols(cols).adjoint() * v;
        v.noalias() -= basis.leftCols(cols) * c;
    }
    return v.norm();
}

}  // namespace

EigenResult lowest_eigenpairs(const LinearOp& op, Eigen::Index dim, const EigenOptions& opts,
                              const Eigen::MatrixXcd& guess, const Preconditioner& precond) {
    if (opts.num < 1 || opts.num > dim) throw InvalidArgument("lowest_eigenpairs: bad eigenpair count");
    const Eigen::Index block = std::min<Eigen::Index>(opts.num + opts.extra, dim);
    const Eigen::Index max_basis = std::min<Eigen::Index>(std::max<Eigen::Index>(opts.max_basis, 3 * block), dim);

    Eigen::MatrixXcd V(dim, max_basis);
    Eigen::MatrixXcd W(dim, max_basis);
    Eigen::Index m = 0;
    EigenResult res;

    auto push = [&](Eigen::VectorXcd v) {
        const double before = v.norm();
        if (before == 0.0) return false;
        const double after = orthogonalize(V, m, v);
        if (after <= 1e-10 * before) return false;
        V.col(m) = v / after;
        Eigen::VectorXcd w(dim);
        op(V.col(m), w);
        ++res.applications;
        W.col(m) = w;
        ++m;
        return true;
    };

    for (Eigen::Index j = 0; j < guess.cols() && m < block; ++j) push(guess.col(j));
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    while (m < block) {
        Eigen::VectorXcd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = {normal(rng), normal(rng)};
        push(v);
    }

    for (int it = 1; it <= opts.max_iter; ++it) {
        res.iterations = it;
        Eigen::MatrixXcd H = V.leftCols(m).adjoint() * W.leftCols(m);
        H = 0.5 * (H + H.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        const Eigen::Index keep = std::min(block, m);
        const Eigen::MatrixXcd Y = es.eigenvectors().leftCols(keep);
        const Eigen::VectorXd theta = es.eigenvalues().head(keep);
        Eigen::MatrixXcd X = V.leftCols(m) * Y;
        Eigen::MatrixXcd AX = W.leftCols(m) * Y;
        Eigen::MatrixXcd R = AX - X * theta.asDiagonal();

        Eigen::VectorXd rn(keep);
        for (Eigen::Index j = 0; j < keep; ++j) rn[j] = R.col(j).norm();

        bool done = true;
        for (int j = 0; j < opts.num; ++j) {
            if (rn[j] > opts.tol * std::max(1.0, std::abs(theta[j]))) done = false;
        }
        if (done || it == opts.max_iter) {
            res.values = theta.head(opts.num);
            res.vectors = X.leftCols(opts.num);
            res.residuals = rn.head(opts.num);
            if (!done) {
                throw ConvergenceError("lowest_eigenpairs: no convergence in " + std::to_string(it) + " iterations",
                                       rn.head(opts.num).maxCoeff());
            }
            return res;
        }

        if (m + block > max_basis) {
            // Thick restart on the current Ritz block.
            V.leftCols(keep) = X;
            W.leftCols(keep) = AX;
            m = keep;
            // Re-orthonormalize to wash out accumulated drift.
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V.leftCols(m));
            Eigen::MatrixXcd Rfac = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
            Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, m);
            // V = Q Rfac, so A Q = W Rfac^{-1}.
            W.leftCols(m) = Rfac.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(W.leftCols(m));
            V.leftCols(m) = Q;
        }

        int added = 0;
        for (Eigen::Index j = 0; j < keep && m < max_basis; ++j) {
            if (j < opts.num && rn[j] <= opts.tol * std::max(1.0, std::abs(theta[j]))) continue;
            Eigen::VectorXcd t = R.col(j);
            if (precond) precond(t, theta[j]);
            if (push(std::move(t))) ++added;
        }
        if (added == 0) {
            // Stagnation: the residuals lie in the basis to working precision.
            res.values = theta.head(opts.num);
            res.vectors = X.leftCols(opts.num);
            res.residuals = rn.head(opts.num);
            if (rn.head(opts.num).maxCoeff() > 1e3 * opts.tol * std::max(1.0, theta.head(opts.num).cwiseAbs().maxCoeff())) {
                throw ConvergenceError("lowest_eigenpairs: search space stagnated", rn.head(opts.num).maxCoeff());
            }
            return res;
        }
    }
    throw ConvergenceError("lowest_eigenpairs: unreachable", 0.0);
}

}  // namespace polaron
