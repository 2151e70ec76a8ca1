#include "fixtures.hpp"

#include "polaron/errors.hpp"
#include "polaron/resolvent.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace polaron;

TEST_CASE("h is symmetric and h - lambda is positive on ran Q") {
    const auto& m = testing::desk_small();
    const Resolvent& R = *m.resolvent;
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5; ++i) {
        const Field f = random_field(m.grid, rng, true);
        const Field g = random_field(m.grid, rng, true);
        CHECK(std::abs(inner(f, R.apply_h(g)) - inner(R.apply_h(f), g)) < 1e-10);
        const Field q = R.project_q(random_field(m.grid, rng, false));
        Field hq = R.apply_h(q);
        hq.values -= R.lambda() * q.values;
        CHECK(inner(q, hq).real() >= -1e-12);
    }
}

TEST_CASE("spectral gap and constant shifts") {
    const auto& m = testing::desk_small();
    const SpectralGap gap = spectral_gap(m.sol);
    CHECK(std::abs(gap.lambda0 - m.sol.lambda) < 1e-8);
    CHECK(gap.gap > 0.05);

    DiscretePekarSolution shifted = m.sol;
    shifted.V_eff.values.array() += 0.75;
    shifted.lambda += 0.75;
    const SpectralGap g2 = spectral_gap(shifted);
    CHECK(g2.lambda0 == doctest::Approx(gap.lambda0 + 0.75).epsilon(1e-10));
    CHECK(g2.lambda1 == doctest::Approx(gap.lambda1 + 0.75).epsilon(1e-10));
    CHECK(g2.gap == doctest::Approx(gap.gap).epsilon(1e-8));

    DiscretePekarSolution wrong = m.sol;
    wrong.lambda += 1e-3;
    CHECK_THROWS_AS(spectral_gap(wrong), InvariantError);
}

TEST_CASE("resolvent identities on random vectors") {
    const auto& m = testing::desk_small();
    const Resolvent& R = *m.resolvent;
    CHECK(R.apply(R.phi0()).norm() < 1e-12);

    std::mt19937_64 rng(1234);
    for (int i = 0; i < 20; ++i) {
        const Field v = random_field(m.grid, rng, false);
        const Field Rv = R.apply(v);
        const Field Qv = R.project_q(v);
        Field res = R.apply_h(Rv);
        res.values -= R.lambda() * Rv.values + Qv.values;
        CHECK(res.norm() <= 1e-8);
        CHECK(std::abs(inner(R.phi0(), Rv)) <= 1e-10);
        CHECK(Rv.norm() <= Qv.norm() / R.gap() * (1 + 1e-12));
    }
}

TEST_CASE("resolvent against a dense pseudo-inverse") {
    const auto& m = testing::desk_small();
    const Resolvent& R = *m.resolvent;
    const Eigen::MatrixXcd h =
        testing::dense_field_operator(m.grid, [&](const Field& f) { return apply_h(f, m.sol.V_eff); });
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    // sum over excited states of |e_n><e_n| / (E_n - E_0), in grid-measure normalization
    const Eigen::MatrixXcd U = es.eigenvectors().rightCols(h.rows() - 1);
    const Eigen::VectorXd inv = (es.eigenvalues().tail(h.rows() - 1).array() - es.eigenvalues()[0]).inverse();
    const Eigen::MatrixXcd dense = U * inv.asDiagonal() * U.adjoint();

    std::mt19937_64 rng(77);
    for (int i = 0; i < 3; ++i) {
        const Field v = random_field(m.grid, rng, false);
        const Eigen::VectorXcd expect = dense * v.values;
        CHECK((R.apply(v).values - expect).norm() / expect.norm() < 1e-8);
    }
}
