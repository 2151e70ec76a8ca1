// quasifree.hpp: generator, time-dependent Bogoliubov map, quasi-free states
//
// Conventions (M modes, c = (a_1..a_M, a_1^dagger..a_M^dagger)):
//   A = [[1 - G, K], [-conj(K), -1 + conj(G)]]   (conj is entrywise)
//   S = diag(1_M, -1_M),  V(t) = exp(-i (t / alpha^2) A)
// Under the quadratic Hamiltonian H = N - sum G_ij a_i^+ a_j - 1/2 sum (K_ij a_i^+ a_j^+ + h.c.)
// the Heisenberg operators are c(t) = (V(t)^{-1})^dagger c, with V^{-1} = S V^dagger S.
// State data: gamma(i,j) = <a_j^+ a_i>, pairing(i,j) = <a_j a_i>.

#pragma once

#include "polaron/kernels.hpp"

#include <filesystem>

namespace polaron {

struct Generator {
    int M = 0;
    Eigen::MatrixXcd A;
    Eigen::MatrixXcd S;
};

// Refuses kernels with |K - K^T| or |G - G^dagger| above tol.
Generator build_generator(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& G, double tol = 1e-10);
Generator build_generator(const KernelPair& kp, double tol = 1e-10);

Eigen::MatrixXcd signature(int M);

struct BogoliubovMap {
    Eigen::MatrixXcd V;
    double t = 0.0;
    double alpha = 1.0;
    double symplectic_defect = 0.0;  // max |V^dagger S V - S|
    bool used_eigendecomposition = true;
};

double symplectic_defect(const Eigen::MatrixXcd& V);

// Warns above 1e-8 and throws InvariantError above 1e-6.
BogoliubovMap propagate_map(const Generator& gen, double t, double alpha);

struct QuasiFreeState {
    Eigen::MatrixXcd gamma;
    Eigen::MatrixXcd pairing;

    int modes() const { return int(gamma.rows()); }
};

QuasiFreeState vacuum_state(int M);

// Two-mode squeezed vacuum exp(r sum_{pairs} (a_i^+ a_ibar^+ - a_i a_ibar)) Omega.
QuasiFreeState squeezed_vacuum(const ModeSet& modes, double r);

// Full correlation matrix Y_pq = <c_p c_q>.
Eigen::MatrixXcd correlation_matrix(const QuasiFreeState& s);
QuasiFreeState from_correlation_matrix(const Eigen::MatrixXcd& Y);

QuasiFreeState evolve_quasifree(const QuasiFreeState& state0, const BogoliubovMap& map);

// RK4 on dY/dt = -(i/alpha^2)(A^dagger Y + Y conj(A)). Throws InvalidArgument
// when dt ||A|| / alpha^2 exceeds the stability limit.
QuasiFreeState evolve_odes(const QuasiFreeState& state0, const Generator& gen, double t, double alpha, double dt);

double expected_number(const QuasiFreeState& s);

// max |Gamma S Gamma + Gamma| with Gamma = [[gamma, pairing], [conj(pairing), 1 + conj(gamma)]].
double purity_defect(const QuasiFreeState& s);

void save_state(const QuasiFreeState& s, const std::filesystem::path& dir);
void save_map(const BogoliubovMap& map, const std::filesystem::path& path);

}  // namespace polaron
