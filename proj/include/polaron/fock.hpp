// fock.hpp: truncated bosonic Fock space over a finite mode set
//
// Basis: occupation tuples (n_0..n_{M-1}) with n_i <= n_max, mixed-radix
// index sum_i n_i (n_max + 1)^i; the vacuum has index 0. Hard truncation:
// a_i^dagger sends n_i = n_max to zero.

#pragma once

#include "polaron/kernels.hpp"
#include "polaron/quasifree.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace polaron {

using SparseMat = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

class FockSpace {
public:
    FockSpace(int M, int n_max, Eigen::Index cap = 200000);

    int modes() const noexcept { return M_; }
    int n_max() const noexcept { return n_max_; }
    Eigen::Index dim() const noexcept { return dim_; }

    int occupation(Eigen::Index index, int mode) const noexcept {
        return int((index / stride_[std::size_t(mode)]) % (n_max_ + 1));
    }
    std::vector<int> occupations(Eigen::Index index) const;
    Eigen::Index index(const std::vector<int>& occ) const;
    Eigen::Index stride(int mode) const noexcept { return stride_[std::size_t(mode)]; }
    int total(Eigen::Index index) const noexcept;

private:
    int M_;
    int n_max_;
    Eigen::Index dim_;
    std::vector<Eigen::Index> stride_;
};

// a_i with sqrt(n) factors.
SparseMat ladder(const FockSpace& fs, int i);
SparseMat number_operator(const FockSpace& fs);

// One factor in a product of ladder operators: creation or annihilation on a mode.
struct LadderFactor {
    int mode;
    bool creation;
};

// P (f_1 f_2 ... f_k) P computed by exact occupation arithmetic: intermediate
// states may exceed n_max, only the final state is projected.
SparseMat projected_product(const FockSpace& fs, const std::vector<LadderFactor>& factors);

// N - sum G_ij a_i^+ a_j - 1/2 sum (K_ij a_i^+ a_j^+ + conj(K_ij) a_i a_j),
// from products of the truncated ladder matrices. Throws InvariantError when
// the Hermiticity defect exceeds 1e-10.
SparseMat build_quadratic_hamiltonian(const KernelPair& kp, const FockSpace& fs);
SparseMat build_quadratic_hamiltonian(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& G, const FockSpace& fs);

// N - A + epsilon with A assembled term by term from the raw matrix-element
// table (a^+a^+, a^+a, a a^+, a a) via projected_product.
SparseMat build_quadratic_from_table(const KernelPair& kp, const FockSpace& fs);

double hermiticity_defect(const SparseMat& H);

// gamma(i,j) = <a_j^+ a_i>, pairing(i,j) = <a_j a_i>.
QuasiFreeState reduced_densities(const Eigen::VectorXcd& psi, const FockSpace& fs);

// Probability of states with some n_i = n_max.
double top_level_population(const Eigen::VectorXcd& psi, const FockSpace& fs);

// <N> for a Fock vector.
double number_expectation(const Eigen::VectorXcd& psi, const FockSpace& fs);

Eigen::VectorXcd fock_vacuum(const FockSpace& fs);

}  // namespace polaron
