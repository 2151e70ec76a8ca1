// coupled.hpp: states in L^2(grid) x Fock and the displaced-frame Hamiltonian
//
// A coupled state is stored as a flat vector viewed as a (grid points) x
// (Fock dim) column-major matrix Psi(x, s). It is normalized with the grid
// measure: sum |Psi|^2 dV = 1.
//
// H_full = (h - lambda) x 1 + alpha^{-2} 1 x N
//          + alpha^{-1} sum_i sqrt(w_i) (conj(dG_i(x)) a_i + dG_i(x) a_i^dagger)
// with dG_i(x) = G_x(k_i) - f0_i.

#pragma once

#include "polaron/discrete_pekar.hpp"
#include "polaron/fock.hpp"
#include "polaron/krylov.hpp"

namespace polaron {

class FullHamiltonian {
public:
    FullHamiltonian(const DiscretePekarSolution& sol, double alpha, const FockSpace& fs);

    void apply(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;
    LinearOp op() const;

    // Individual pieces, each as a map on coupled vectors.
    void apply_electron(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;  // (h - lambda) x 1
    void apply_number(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;    // 1 x N
    void apply_coupling(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;  // phi(dG), no alpha

    double alpha() const noexcept { return alpha_; }
    Eigen::Index grid_size() const noexcept { return grid_.size(); }
    Eigen::Index fock_dim() const noexcept { return fs_.dim(); }
    Eigen::Index dim() const noexcept { return grid_.size() * fs_.dim(); }
    const Grid3& grid() const noexcept { return grid_; }
    const FockSpace& fock() const noexcept { return fs_; }

private:
    Grid3 grid_;
    FockSpace fs_;
    double alpha_;
    double lambda_;
    Field V_;
    std::vector<Eigen::VectorXcd> dG_;
    std::vector<double> sqrt_w_;
    std::vector<SparseMat> a_t_;   // transpose of a_i
    std::vector<SparseMat> ad_t_;  // transpose of a_i^dagger
    Eigen::VectorXd number_;
};

// phi (x) eta as a coupled vector.
Eigen::VectorXcd product_state(const Field& phi, const Eigen::VectorXcd& eta);

// Grid-measure norm and inner product of coupled vectors.
double coupled_norm(const Eigen::VectorXcd& psi, const Grid3& g);
cd coupled_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid3& g);

// Phonon marginals of a coupled state: <N>, top-level population.
double coupled_number(const Eigen::VectorXcd& psi, const Grid3& g, const FockSpace& fs);
double coupled_top_level(const Eigen::VectorXcd& psi, const Grid3& g, const FockSpace& fs);

struct ElectronDistance {
    double trace_distance = 0.0;  // Tr |rho_el - |phi0><phi0||, exact on the span of the state's columns and phi0
    double active_weight = 0.0;   // weight of rho_el inside span{phi0, active vectors}
    double compressed_distance = 0.0; // same distance with rho_el compressed to that span
    int rank = 0;
};

// Distance between the electron reduced density of psi and |phi0><phi0|.
// `active` are extra electron vectors spanning the compressed basis.
ElectronDistance electron_distance(const Eigen::VectorXcd& psi, const Field& phi0,
                                   const std::vector<Field>& active = {});

// Trace norm of the difference of two pure-state electron densities given by
// coupled vectors; used in tests.
double electron_trace_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid3& g);

}  // namespace polaron
