#include "polaron/krylov.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace polaron {
namespace {

struct LanczosBasis {
    Eigen::MatrixXcd V;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;  // beta[j] couples V_j and V_{j+1}; beta[m-1] is the leak
    int m = 0;
    bool exact = false;    // invariant subspace found
};

LanczosBasis lanczos(const LinearOp& H, const Eigen::VectorXcd& v, int kdim, KrylovStats& stats) {
    const Eigen::Index n = v.size();
    kdim = int(std::min<Eigen::Index>(kdim, n));
    LanczosBasis b;
    b.V.resize(n, kdim + 1);
    b.alpha.resize(kdim);
    b.beta.resize(kdim);
    const double vnorm = v.norm();
    b.V.col(0) = v / vnorm;
    Eigen::VectorXcd w(n);
    for (int j = 0; j < kdim; ++j) {
        H(b.V.col(j), w);
        ++stats.applications;
        b.alpha[j] = b.V.col(j).dot(w).real();
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXcd c = b.V.leftCols(j + 1).adjoint() * w;
            w.noalias() -= b.V.leftCols(j + 1) * c;
        }
        const double bn = w.norm();
        b.beta[j] = bn;
        b.m = j + 1;
        if (bn <= 1e-13 * std::max(1.0, std::abs(b.alpha[j]))) {
            b.exact = true;
            b.beta[j] = 0.0;
            break;
        }
        b.V.col(j + 1) = w / bn;
    }
    return b;
}

// exp(-i T dt) e_1 for the leading m x m tridiagonal block.
Eigen::VectorXcd small_exp(const LanczosBasis& b, double dt) {
    const int m = b.m;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        T(j, j) = b.alpha[j];
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = b.beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    Eigen::VectorXcd c(m);
    for (int j = 0; j < m; ++j) c[j] = std::polar(1.0, -es.eigenvalues()[j] * dt) * Q(0, j);
    return Q.cast<std::complex<double>>() * c;
}

}  // namespace

Eigen::VectorXcd expm_multiply(const LinearOp& H, const Eigen::VectorXcd& v, double t, const KrylovOptions& opts,
                               KrylovStats* stats_out) {
    KrylovStats stats;
    Eigen::VectorXcd psi = v;
    const double total = std::abs(t);
    const double sign = t < 0 ? -1.0 : 1.0;
    const double vnorm = v.norm();
    if (total == 0.0 || vnorm == 0.0) {
        if (stats_out) *stats_out = stats;
        return psi;
    }

    double done = 0.0;
    double dt = std::min(total, opts.max_step);
    while (done < total) {
        dt = std::min(dt, total - done);
        const double pnorm = psi.norm();
        const LanczosBasis b = lanczos(H, psi, opts.krylov_dim, stats);
        for (;;) {
            const Eigen::VectorXcd c = small_exp(b, sign * dt);
            const double err = b.exact ? 0.0 : b.beta[b.m - 1] * std::abs(c[b.m - 1]) * pnorm;
            const double budget = opts.tol * vnorm * std::max(dt, 1e-300) / total;
            if (err <= budget || dt < 1e-12 * total) {
                if (err > budget) {
                    throw ConvergenceError("expm_multiply: step size underflow, increase krylov_dim", err);
                }
                psi = pnorm * (b.V.leftCols(b.m) * c);
                done += dt;
                stats.error_estimate += err;
                ++stats.substeps;
                // Grow the step gently when the estimate has slack.
                if (err < 0.1 * budget) dt = std::min(1.5 * dt, opts.max_step);
                break;
            }
            ++stats.rejected;
            dt *= 0.5;
        }
    }
    if (stats_out) *stats_out = stats;
    return psi;
}

}  // namespace polaron
