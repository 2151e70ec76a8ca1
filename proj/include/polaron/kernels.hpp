// kernels.hpp: Bogoliubov kernels K, G and the constant epsilon on a mode set
//
// With b_j = e^{-i k_j x} phi0, u_j = R b_j and g_j = 1 / (2 pi |k_j|):
//   K(i,j) = sqrt(w_i w_j) g_i g_j (<b_ibar, u_j> + <b_jbar, u_i>)
//   G(i,j) = sqrt(w_i w_j) g_i g_j (<b_i, u_j> + <b_ibar, u_jbar>)
//   epsilon = trace(G) / 2
// where ibar is the parity partner of i (k_ibar = -k_i).

#pragma once

#include "polaron/mode_set.hpp"
#include "polaron/resolvent.hpp"

#include <filesystem>

namespace polaron {

struct KernelPair {
    ModeSet modes;
    Eigen::MatrixXcd K;
    Eigen::MatrixXcd G;
    double epsilon = 0.0;

    // Raw matrix elements sqrt(w_i w_j) <phi0, c_i^s R c_j^t phi0> with
    // c^+ = G_x(k) (goes with a^dagger) and c^- = conj G_x(k) (goes with a).
    Eigen::MatrixXcd raw_pp, raw_pm, raw_mp, raw_mm;

    // <u_i, (h - lambda) u_i> scaled like G(i,i) / 2: an independent route to
    // the diagonal of G.
    Eigen::VectorXd diagonal_check;
};

struct KernelDiagnostics {
    double k_symmetry = 0.0;     // max |K - K^T|
    double g_hermiticity = 0.0;  // max |G - G^dagger|
    double k_imag = 0.0;         // max |Im K|
    double g_imag = 0.0;
    double k_parity = 0.0;       // max |conj K(i,j) - K(ibar, jbar)|
    double g_parity = 0.0;       // max |conj G(i,j) - G(j,i)|
    double epsilon_defect = 0.0; // |epsilon - trace(G)/2|
    double cross_route = 0.0;    // max_i |G(i,i)/2 - diagonal_check(i)|
    double min_g_diagonal = 0.0;
    double norm_bound_ratio = 0.0; // max(||K||, ||G||) / crude bound
};

KernelPair build_kernels(const PekarSolution& sol, const ModeSet& modes, const Resolvent& R);

KernelDiagnostics diagnose(const KernelPair& kp, double gap);

// kernels.json with modes, weights, epsilon, and K.pfld, G.pfld.
void save_kernels(const KernelPair& kp, const std::filesystem::path& dir);
KernelPair load_kernels(const std::filesystem::path& dir);

}  // namespace polaron
