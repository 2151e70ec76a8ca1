#include "fixtures.hpp"

#include "polaron/errors.hpp"
#include "polaron/quasifree.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace polaron;

TEST_CASE("free generator: A = S and V is a phase per sector") {
    const int M = 2;
    const Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(M, M);
    const Generator gen = build_generator(Z, Z);
    CHECK(testing::max_abs(gen.A - gen.S) == 0.0);
    const double alpha = 3.0, t = 2.0;
    const BogoliubovMap map = propagate_map(gen, t, alpha);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
    for (int i = 0; i < M; ++i) {
        expect(i, i) = std::polar(1.0, -t / (alpha * alpha));
        expect(M + i, M + i) = std::polar(1.0, t / (alpha * alpha));
    }
    CHECK(testing::max_abs(map.V - expect) < 1e-14);
    const QuasiFreeState s = evolve_quasifree(vacuum_state(M), map);
    CHECK(testing::max_abs(s.gamma) < 1e-15);
    CHECK(testing::max_abs(s.pairing) < 1e-15);
    CHECK(expected_number(s) == 0.0);
}

TEST_CASE("generator structure on desk-small kernels") {
    const auto& m = testing::desk_small();
    const Generator gen = build_generator(m.kernels);
    const Eigen::MatrixXcd SA = gen.S * gen.A;
    CHECK(testing::max_abs(SA - SA.adjoint()) <= 1e-12);

    const Eigen::VectorXcd mu = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(gen.A).eigenvalues();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        double best = 1e300;
        for (Eigen::Index j = 0; j < mu.size(); ++j) best = std::min(best, std::abs(mu[j] + std::conj(mu[i])));
        CHECK(best < 1e-10);
    }

    Eigen::MatrixXcd K = m.kernels.K;
    K(0, 1) += 1e-6;
    CHECK_THROWS_AS(build_generator(K, m.kernels.G), InvariantError);
}

TEST_CASE("Bogoliubov map: identity, symplectic, group law") {
    const auto& m = testing::desk_small();
    const Generator gen = build_generator(m.kernels);
    const double alpha = 2.0;
    const BogoliubovMap id = propagate_map(gen, 0.0, alpha);
    CHECK(testing::max_abs(id.V - Eigen::MatrixXcd::Identity(4, 4)) < 1e-14);
    for (double tau : {0.5, 1.0, 2.5, 5.0, 10.0}) {
        CHECK(propagate_map(gen, tau * alpha * alpha, alpha).symplectic_defect <= 1e-8);
    }
    const double t = 1.7 * alpha * alpha, s = 2.9 * alpha * alpha;
    const Eigen::MatrixXcd lhs = propagate_map(gen, t + s, alpha).V;
    const Eigen::MatrixXcd rhs = propagate_map(gen, t, alpha).V * propagate_map(gen, s, alpha).V;
    CHECK(testing::max_abs(lhs - rhs) <= 1e-9);

    const QuasiFreeState v = vacuum_state(2);
    const QuasiFreeState same = evolve_quasifree(v, id);
    CHECK(testing::max_abs(same.gamma) == 0.0);
}

TEST_CASE("quasi-free states") {
    const auto& m = testing::desk_small();
    const QuasiFreeState v = vacuum_state(2);
    CHECK(expected_number(v) == 0.0);
    CHECK(purity_defect(v) < 1e-15);
    const QuasiFreeState sq = squeezed_vacuum(m.modes, 0.3);
    CHECK(expected_number(sq) == doctest::Approx(2 * std::pow(std::sinh(0.3), 2)));
    CHECK(purity_defect(sq) < 1e-14);
    const QuasiFreeState back = from_correlation_matrix(correlation_matrix(sq));
    CHECK(testing::max_abs(back.gamma - sq.gamma) == 0.0);
    CHECK(testing::max_abs(back.pairing - sq.pairing) == 0.0);

    const Generator gen = build_generator(m.kernels);
    const QuasiFreeState evolved = evolve_quasifree(sq, propagate_map(gen, 3.0 * 4, 2.0));
    CHECK(purity_defect(evolved) < 1e-10);
}

TEST_CASE("ODE route against the exponential route") {
    const auto& m = testing::desk_small();
    const Generator gen = build_generator(m.kernels);
    const double alpha = 2.0, t = 1.0 * alpha * alpha;
    const QuasiFreeState s0 = squeezed_vacuum(m.modes, 0.2);
    CHECK(testing::max_abs(evolve_odes(s0, gen, 0.0, alpha, 0.1).gamma - s0.gamma) == 0.0);

    const QuasiFreeState exact = evolve_quasifree(s0, propagate_map(gen, t, alpha));
    const QuasiFreeState fine = evolve_odes(s0, gen, t, alpha, 0.01);
    CHECK(std::abs(fine.gamma.trace() - exact.gamma.trace()) <= 1e-8);

    const double e1 = testing::max_abs(evolve_odes(s0, gen, t, alpha, 0.2).gamma - exact.gamma);
    const double e2 = testing::max_abs(evolve_odes(s0, gen, t, alpha, 0.1).gamma - exact.gamma);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));

    CHECK_THROWS_AS(evolve_odes(s0, gen, t, alpha, 50.0), InvalidArgument);
}
