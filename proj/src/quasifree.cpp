#include "polaron/quasifree.hpp"

#include "polaron/errors.hpp"
#include "polaron/pfld.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <iostream>

namespace polaron {
namespace {

using Mat = Eigen::MatrixXcd;

Mat exp_minus_i(const Mat& A, double s, bool* used_eig) {
    Eigen::ComplexEigenSolver<Mat> es(A);
    if (es.info() == Eigen::Success) {
        const Mat& P = es.eigenvectors();
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(P).singularValues();
        const double cond = sv[0] / sv[sv.size() - 1];
        if (std::isfinite(cond) && cond < 1e8) {
            Eigen::VectorXcd d(A.rows());
            for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::exp(cd(0.0, -s) * es.eigenvalues()[i]);
            if (used_eig) *used_eig = true;
            return P * d.asDiagonal() * P.partialPivLu().inverse();
        }
    }
    if (used_eig) *used_eig = false;
    const Mat X = cd(0.0, -s) * A;
    return X.exp();
}

}  // namespace

Eigen::MatrixXcd signature(int M) {
    Mat S = Mat::Identity(2 * M, 2 * M);
    S.bottomRightCorner(M, M) *= -1.0;
    return S;
}

Generator build_generator(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& G, double tol) {
    const Eigen::Index M = K.rows();
    if (K.cols() != M || G.rows() != M || G.cols() != M) throw InvalidArgument("build_generator: shape mismatch");
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > tol) throw InvariantError("build_generator: K is not symmetric");
    if ((G - G.adjoint()).cwiseAbs().maxCoeff() > tol) throw InvariantError("build_generator: G is not Hermitian");
    Generator gen;
    gen.M = int(M);
    const Mat I = Mat::Identity(M, M);
    gen.A.resize(2 * M, 2 * M);
    gen.A << I - G, K, -K.conjugate(), -I + G.conjugate();
    gen.S = signature(int(M));
    return gen;
}

Generator build_generator(const KernelPair& kp, double tol) { return build_generator(kp.K, kp.G, tol); }

double symplectic_defect(const Eigen::MatrixXcd& V) {
    const int M = int(V.rows() / 2);
    const Mat S = signature(M);
    return (V.adjoint() * S * V - S).cwiseAbs().maxCoeff();
}

BogoliubovMap propagate_map(const Generator& gen, double t, double alpha) {
    if (!(alpha > 0.0)) throw InvalidArgument("propagate_map: alpha must be positive");
    BogoliubovMap map;
    map.t = t;
    map.alpha = alpha;
    if (t == 0.0) {
        map.V = Mat::Identity(2 * gen.M, 2 * gen.M);
        return map;
    }
    map.V = exp_minus_i(gen.A, t / (alpha * alpha), &map.used_eigendecomposition);
    map.symplectic_defect = symplectic_defect(map.V);
    if (map.symplectic_defect > 1e-6) {
        throw InvariantError("propagate_map: symplectic defect " + std::to_string(map.symplectic_defect));
    }
    if (map.symplectic_defect > 1e-8) {
        std::cerr << "warning: propagate_map: symplectic defect " << map.symplectic_defect << " at t = " << t << '\n';
    }
    return map;
}

QuasiFreeState vacuum_state(int M) { return {Mat::Zero(M, M), Mat::Zero(M, M)}; }

QuasiFreeState squeezed_vacuum(const ModeSet& modes, double r) {
    const int M = modes.size();
    QuasiFreeState s = vacuum_state(M);
    for (int i = 0; i < M; ++i) {
        s.gamma(i, i) = std::pow(std::sinh(r), 2);
        s.pairing(i, modes.partner[std::size_t(i)]) = std::sinh(r) * std::cosh(r);
    }
    return s;
}

Eigen::MatrixXcd correlation_matrix(const QuasiFreeState& s) {
    const int M = s.modes();
    Mat Y(2 * M, 2 * M);
    const Mat I = Mat::Identity(M, M);
    // <a_i a_j> = pairing(j,i), <a_i a_j^+> = delta + gamma(i,j),
    // <a_i^+ a_j> = gamma(j,i), <a_i^+ a_j^+> = conj(pairing(i,j)).
    Y << s.pairing.transpose(), I + s.gamma, s.gamma.transpose(), s.pairing.conjugate();
    return Y;
}

QuasiFreeState from_correlation_matrix(const Eigen::MatrixXcd& Y) {
    const Eigen::Index M = Y.rows() / 2;
    QuasiFreeState s;
    s.gamma = Y.bottomLeftCorner(M, M).transpose();
    s.pairing = Y.topLeftCorner(M, M).transpose();
    return s;
}

QuasiFreeState evolve_quasifree(const QuasiFreeState& state0, const BogoliubovMap& map) {
    const int M = state0.modes();
    if (map.V.rows() != 2 * M) throw InvalidArgument("evolve_quasifree: map and state sizes differ");
    const Mat S = signature(M);
    const Mat Vinv = S * map.V.adjoint() * S;
    const Mat Mc = Vinv.conjugate();
    const Mat Y = Mc.transpose() * correlation_matrix(state0) * Mc;
    return from_correlation_matrix(Y);
}

QuasiFreeState evolve_odes(const QuasiFreeState& state0, const Generator& gen, double t, double alpha, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("evolve_odes: dt must be positive");
    if (t == 0.0) return state0;
    const double scale = 1.0 / (alpha * alpha);
    const double anorm = Eigen::JacobiSVD<Mat>(gen.A).singularValues()[0];
    if (dt * scale * anorm > 1.0) {
        throw InvalidArgument("evolve_odes: dt too large for stability; use dt <= " +
                              std::to_string(1.0 / (scale * anorm)));
    }
    const Mat Ad = gen.A.adjoint();
    const Mat Ac = gen.A.conjugate();
    const cd c(0.0, -scale);
    auto rhs = [&](const Mat& Y) -> Mat { return c * (Ad * Y + Y * Ac); };

    Mat Y = correlation_matrix(state0);
    const int steps = int(std::ceil(std::abs(t) / dt - 1e-12));
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        const Mat k1 = rhs(Y);
        const Mat k2 = rhs(Y + 0.5 * h * k1);
        const Mat k3 = rhs(Y + 0.5 * h * k2);
        const Mat k4 = rhs(Y + h * k3);
        Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return from_correlation_matrix(Y);
}

double expected_number(const QuasiFreeState& s) { return s.gamma.trace().real(); }

double purity_defect(const QuasiFreeState& s) {
    const int M = s.modes();
    Mat Gamma(2 * M, 2 * M);
    Gamma << s.gamma, s.pairing, s.pairing.conjugate(), Mat::Identity(M, M) + s.gamma.conjugate();
    const Mat S = signature(M);
    return (Gamma * S * Gamma + Gamma).cwiseAbs().maxCoeff();
}

void save_state(const QuasiFreeState& s, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    pfld::save_matrix(s.gamma, dir / "gamma.pfld", "gamma");
    pfld::save_matrix(s.pairing, dir / "pairing.pfld", "pairing");
}

void save_map(const BogoliubovMap& map, const std::filesystem::path& path) { pfld::save_matrix(map.V, path, "bogmap"); }

}  // namespace polaron
