#include "fixtures.hpp"

#include "polaron/kernels.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <filesystem>

using namespace polaron;

TEST_CASE("kernel structure on desk-small") {
    const auto& m = testing::desk_small();
    const KernelPair& kp = m.kernels;
    CHECK(testing::max_abs(kp.K - kp.K.transpose()) <= 1e-10);
    CHECK(testing::max_abs(kp.G - kp.G.adjoint()) <= 1e-10);
    CHECK(kp.K.imag().cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(kp.G.imag().cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(kp.epsilon == kp.G.trace().real() / 2);
    for (int i = 0; i < kp.modes.size(); ++i) {
        CHECK(kp.G(i, i).real() >= 0.0);
        CHECK(std::abs(kp.G(i, i).real() / 2 - kp.diagonal_check[i]) <= 1e-8);
    }
    const KernelDiagnostics d = m.diagnostics;
    CHECK(d.epsilon_defect == 0.0);
    CHECK(d.k_parity <= 1e-10);
    CHECK(d.g_parity <= 1e-10);
    CHECK(d.cross_route <= 1e-8);
}

TEST_CASE("kernels against a dense resolvent") {
    const auto& m = testing::desk_small();
    const Grid3& g = m.grid;
    const Eigen::MatrixXcd h =
        testing::dense_field_operator(g, [&](const Field& f) { return apply_h(f, m.sol.V_eff); });
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::Index n = h.rows();
    const Eigen::MatrixXcd U = es.eigenvectors().rightCols(n - 1);
    const Eigen::VectorXd inv = (es.eigenvalues().tail(n - 1).array() - es.eigenvalues()[0]).inverse();
    const Eigen::MatrixXcd R = U * inv.asDiagonal() * U.adjoint();

    const ModeSet& modes = m.modes;
    const int M = modes.size();
    std::vector<Eigen::VectorXcd> b(static_cast<std::size_t>(M)), u(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        b[std::size_t(j)] = plane_wave(g, -modes.k[std::size_t(j)]).values.cwiseProduct(m.sol.phi0.values);
        u[std::size_t(j)] = R * b[std::size_t(j)];
    }
    auto S = [&](int i, int j) { return b[std::size_t(i)].dot(u[std::size_t(j)]) * g.cell_volume(); };
    Eigen::MatrixXcd K(M, M), G(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const int ib = modes.partner[std::size_t(i)], jb = modes.partner[std::size_t(j)];
            const double pref = std::sqrt(modes.w[std::size_t(i)] * modes.w[std::size_t(j)]) *
                                modes.coupling_amplitude(i) * modes.coupling_amplitude(j);
            K(i, j) = pref * (S(ib, j) + S(jb, i));
            G(i, j) = pref * (S(i, j) + S(ib, jb));
        }
    }
    CHECK(testing::max_abs(K - m.kernels.K) < 1e-8);
    CHECK(testing::max_abs(G - m.kernels.G) < 1e-8);
}

TEST_CASE("kernel files round trip") {
    const auto& m = testing::desk_small();
    const auto dir = std::filesystem::temp_directory_path() / "polaron-test-kernels";
    save_kernels(m.kernels, dir);
    const KernelPair back = load_kernels(dir);
    CHECK(back.K == m.kernels.K);
    CHECK(back.G == m.kernels.G);
    CHECK(back.epsilon == m.kernels.epsilon);
    CHECK(back.modes.size() == m.kernels.modes.size());
    CHECK(back.modes.partner == m.kernels.modes.partner);
}
