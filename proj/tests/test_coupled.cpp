#include "fixtures.hpp"

#include "polaron/coupled.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace polaron;

namespace {

Eigen::VectorXcd random_coupled(Eigen::Index dim, const Grid3& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(dim);
    for (auto& x : v) x = cd(nd(rng), nd(rng));
    return v / coupled_norm(v, g);
}

// Tr |rho_el - |phi><phi|| from the full grid density matrix.
double dense_distance(const Eigen::VectorXcd& psi, const Field& phi, Eigen::Index fock_dim) {
    const Grid3& g = phi.grid;
    const Eigen::MatrixXcd X = Eigen::Map<const Eigen::MatrixXcd>(psi.data(), g.size(), fock_dim);
    const Eigen::MatrixXcd rho = X * X.adjoint() * g.cell_volume();
    const Eigen::MatrixXcd diff = rho - phi.values * phi.values.adjoint() * g.cell_volume();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(diff).eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST_CASE("full Hamiltonian: ground-product expectation and symmetry") {
    const auto& m = testing::desk_small();
    const FockSpace fs(2, 4);
    const FullHamiltonian H(m.sol, 3.0, fs);
    const Eigen::VectorXcd psi0 = product_state(m.sol.phi0, fock_vacuum(fs));
    CHECK(coupled_norm(psi0, m.grid) == doctest::Approx(1.0));
    Eigen::VectorXcd Hpsi;
    H.apply(psi0, Hpsi);
    CHECK(std::abs(coupled_inner(psi0, Hpsi, m.grid)) < 1e-10);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXcd a = random_coupled(H.dim(), m.grid, rng);
        const Eigen::VectorXcd b = random_coupled(H.dim(), m.grid, rng);
        Eigen::VectorXcd Ha, Hb;
        H.apply(a, Ha);
        H.apply(b, Hb);
        CHECK(std::abs(coupled_inner(a, Hb, m.grid) - coupled_inner(Ha, b, m.grid)) < 1e-10);
    }
}

TEST_CASE("coupling strength falls off like 1 / alpha") {
    const auto& m = testing::desk_small();
    const FockSpace fs(2, 3);
    std::mt19937_64 rng(2);
    const Eigen::VectorXcd psi = random_coupled(m.grid.size() * fs.dim(), m.grid, rng);
    auto rest = [&](double alpha) {
        const FullHamiltonian H(m.sol, alpha, fs);
        Eigen::VectorXcd full, el;
        H.apply(psi, full);
        H.apply_electron(psi, el);
        return coupled_norm(full - el, m.grid);
    };
    const double r1 = rest(50.0), r2 = rest(100.0), r3 = rest(200.0);
    CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.02));
    CHECK(r2 / r3 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("unitary evolution conserves norm and energy") {
    const auto& m = testing::desk_small();
    const FockSpace fs(2, 6);
    const FullHamiltonian H(m.sol, 2.0, fs);
    Eigen::VectorXcd psi = product_state(m.sol.phi0, fock_vacuum(fs));
    Eigen::VectorXcd Hpsi;
    H.apply(psi, Hpsi);
    const double E0 = coupled_inner(psi, Hpsi, m.grid).real();
    KrylovOptions ko;
    ko.tol = 1e-10;
    psi = expm_multiply(H.op(), psi, 3.0, ko);
    H.apply(psi, Hpsi);
    CHECK(std::abs(coupled_norm(psi, m.grid) - 1.0) < 1e-9);
    CHECK(std::abs(coupled_inner(psi, Hpsi, m.grid).real() - E0) < 1e-8);
    CHECK(coupled_number(psi, m.grid, fs) > 0.0);
}

TEST_CASE("electron reduced density distances") {
    const auto& m = testing::desk_small();
    const FockSpace fs(2, 2);
    const Eigen::VectorXcd prod = product_state(m.sol.phi0, fock_vacuum(fs));
    CHECK(electron_distance(prod, m.sol.phi0).trace_distance < 1e-12);

    // orthogonal electron factors
    Field other(m.grid, m.resolvent->apply(gaussian(m.grid, 1.0, Vec3(1, 0, 0))).values);
    other.values /= other.norm();
    const Eigen::VectorXcd orth = product_state(other, fock_vacuum(fs));
    CHECK(electron_trace_distance(prod, orth, m.grid) == doctest::Approx(2.0).epsilon(1e-10));

    std::mt19937_64 rng(99);
    const Eigen::VectorXcd psi = random_coupled(m.grid.size() * fs.dim(), m.grid, rng);
    const ElectronDistance d = electron_distance(psi, m.sol.phi0, {other});
    CHECK(d.trace_distance == doctest::Approx(dense_distance(psi, m.sol.phi0, fs.dim())).epsilon(1e-10));
    CHECK(d.active_weight <= 1.0 + 1e-12);
    CHECK(d.compressed_distance >= 0.0);
}
