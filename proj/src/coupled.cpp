#include "polaron/coupled.hpp"

#include "polaron/errors.hpp"

#include <cmath>

namespace polaron {
namespace {

using MapMat = Eigen::Map<Eigen::MatrixXcd>;
using ConstMapMat = Eigen::Map<const Eigen::MatrixXcd>;

// Eigenvalue abs-sum of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

// Orthonormal basis (Euclidean) of the column span of X, dropping directions
// below a relative threshold.
Eigen::MatrixXcd orthonormal_span(const Eigen::MatrixXcd& X) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(X);
    qr.setThreshold(1e-13);
    const Eigen::Index r = qr.rank();
    return qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), r);
}

}  // namespace

FullHamiltonian::FullHamiltonian(const DiscretePekarSolution& sol, double alpha, const FockSpace& fs)
    : grid_(sol.phi0.grid), fs_(fs), alpha_(alpha), lambda_(sol.lambda), V_(sol.V_eff) {
    if (!(alpha > 0.0)) throw InvalidArgument("FullHamiltonian: alpha must be positive");
    if (sol.modes.size() != fs.modes()) throw InvalidArgument("FullHamiltonian: Fock space and mode set differ");
    for (int i = 0; i < fs.modes(); ++i) {
        dG_.push_back(delta_coupling_field(sol, i).values);
        sqrt_w_.push_back(std::sqrt(sol.modes.w[std::size_t(i)]));
        const SparseMat a = ladder(fs, i);
        a_t_.push_back(SparseMat(a.transpose()));
        ad_t_.push_back(SparseMat(a.adjoint().transpose()));
    }
    number_.resize(fs.dim());
    for (Eigen::Index s = 0; s < fs.dim(); ++s) number_[s] = fs.total(s);
}

void FullHamiltonian::apply_electron(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const Eigen::Index G = grid_.size(), F = fs_.dim();
    out.resize(psi.size());
    ConstMapMat P(psi.data(), G, F);
    MapMat O(out.data(), G, F);
    for (Eigen::Index s = 0; s < F; ++s) {
        Field col(grid_, P.col(s));
        Field hc = apply_h(col, V_);
        O.col(s) = hc.values - lambda_ * col.values;
    }
}

void FullHamiltonian::apply_number(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const Eigen::Index G = grid_.size(), F = fs_.dim();
    out.resize(psi.size());
    ConstMapMat P(psi.data(), G, F);
    MapMat O(out.data(), G, F);
    O = P * number_.asDiagonal();
}

void FullHamiltonian::apply_coupling(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const Eigen::Index G = grid_.size(), F = fs_.dim();
    out.setZero(psi.size());
    ConstMapMat P(psi.data(), G, F);
    MapMat O(out.data(), G, F);
    Eigen::MatrixXcd tmp(G, F);
    for (std::size_t i = 0; i < dG_.size(); ++i) {
        // (a_i Psi)(x, s) = sum_s' a(s, s') Psi(x, s')  <=>  Psi a^T.
        tmp = P * a_t_[i];
        O += sqrt_w_[i] * (dG_[i].conjugate().asDiagonal() * tmp);
        tmp = P * ad_t_[i];
        O += sqrt_w_[i] * (dG_[i].asDiagonal() * tmp);
    }
}

void FullHamiltonian::apply(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    if (psi.size() != dim()) throw InvalidArgument("FullHamiltonian::apply: state size mismatch");
    Eigen::VectorXcd tmp;
    apply_electron(psi, out);
    apply_number(psi, tmp);
    out += tmp / (alpha_ * alpha_);
    apply_coupling(psi, tmp);
    out += tmp / alpha_;
}

LinearOp FullHamiltonian::op() const {
    return [this](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { apply(x, y); };
}

Eigen::VectorXcd product_state(const Field& phi, const Eigen::VectorXcd& eta) {
    Eigen::MatrixXcd m = phi.values * eta.transpose();
    return Eigen::Map<Eigen::VectorXcd>(m.data(), m.size());
}

double coupled_norm(const Eigen::VectorXcd& psi, const Grid3& g) { return std::sqrt(psi.squaredNorm() * g.cell_volume()); }

cd coupled_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid3& g) { return a.dot(b) * g.cell_volume(); }

double coupled_number(const Eigen::VectorXcd& psi, const Grid3& g, const FockSpace& fs) {
    ConstMapMat P(psi.data(), g.size(), fs.dim());
    double n = 0.0;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) n += fs.total(s) * P.col(s).squaredNorm();
    return n * g.cell_volume();
}

double coupled_top_level(const Eigen::VectorXcd& psi, const Grid3& g, const FockSpace& fs) {
    ConstMapMat P(psi.data(), g.size(), fs.dim());
    Eigen::VectorXcd marginal(fs.dim());
    for (Eigen::Index s = 0; s < fs.dim(); ++s) marginal[s] = std::sqrt(P.col(s).squaredNorm() * g.cell_volume());
    return top_level_population(marginal, fs);
}

ElectronDistance electron_distance(const Eigen::VectorXcd& psi, const Field& phi0, const std::vector<Field>& active) {
    const Grid3& g = phi0.grid;
    const Eigen::Index G = g.size();
    if (psi.size() % G != 0) throw InvalidArgument("electron_distance: state size is not a multiple of the grid");
    const Eigen::Index F = psi.size() / G;
    const double sdv = std::sqrt(g.cell_volume());
    // Euclidean representation: columns carry sqrt(dV) so rho = X X^dagger has unit trace.
    const Eigen::MatrixXcd X = ConstMapMat(psi.data(), G, F) * sdv;
    const Eigen::VectorXcd p = phi0.values * sdv;

    ElectronDistance out;
    {
        Eigen::MatrixXcd span(G, F + 1);
        span << p, X;
        const Eigen::MatrixXcd Q = orthonormal_span(span);
        out.rank = int(Q.cols());
        const Eigen::MatrixXcd Xq = Q.adjoint() * X;
        const Eigen::VectorXcd pq = Q.adjoint() * p;
        out.trace_distance = trace_norm(Xq * Xq.adjoint() - pq * pq.adjoint());
    }
    {
        Eigen::MatrixXcd span(G, Eigen::Index(active.size()) + 1);
        span.col(0) = p;
        for (std::size_t i = 0; i < active.size(); ++i) span.col(Eigen::Index(i) + 1) = active[i].values * sdv;
        const Eigen::MatrixXcd Q = orthonormal_span(span);
        const Eigen::MatrixXcd Xq = Q.adjoint() * X;
        const Eigen::VectorXcd pq = Q.adjoint() * p;
        out.active_weight = Xq.squaredNorm();
        out.compressed_distance = trace_norm(Xq * Xq.adjoint() - pq * pq.adjoint());
    }
    return out;
}

double electron_trace_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid3& g) {
    const Eigen::Index G = g.size();
    const Eigen::Index F = a.size() / G;
    const double sdv = std::sqrt(g.cell_volume());
    const Eigen::MatrixXcd A = ConstMapMat(a.data(), G, F) * sdv;
    const Eigen::MatrixXcd B = ConstMapMat(b.data(), G, b.size() / G) * sdv;
    Eigen::MatrixXcd span(G, A.cols() + B.cols());
    span << A, B;
    const Eigen::MatrixXcd Q = orthonormal_span(span);
    const Eigen::MatrixXcd Aq = Q.adjoint() * A, Bq = Q.adjoint() * B;
    return trace_norm(Aq * Aq.adjoint() - Bq * Bq.adjoint());
}

}  // namespace polaron
