// discrete_pekar.hpp: Pekar problem restricted to a finite mode set
//
// With f_i = <phi, G_x(k_i) phi> the mean-field potential is
// V(x) = -2 Re sum_i w_i conj(G_x(k_i)) f_i and the energy is
// E = T - sum_i w_i |f_i|^2, so D = 2 sum_i w_i |f_i|^2 and lambda = T - D.

#pragma once

#include "polaron/mode_set.hpp"
#include "polaron/pekar.hpp"

#include <optional>

namespace polaron {

struct DiscretePekarOptions {
    double damping = 0.0;  // f_next = (1 - damping) f(phi) + damping f_prev
    double tol = 1e-12;    // on max_i |f_next - f_prev|
    int max_iter = 1000;
    double eig_tol = 1e-12;
};

struct DiscretePekarSolution : PekarSolution {
    ModeSet modes;
    Eigen::VectorXcd f0;              // f0_i = <phi0, G_x(k_i) phi0>
    double sc_residual = 0.0;         // max_i |f0_i - coefficient used in V|
    std::vector<double> axis_spread;  // <x_a^2> per axis

    DiscretePekarSolution(const Grid3& g, ModeSet m) : PekarSolution(g), modes(std::move(m)) {}
};

// f_i = <phi, G_x(k_i) phi>.
Eigen::VectorXcd discrete_f0(const ModeSet& modes, const Field& phi);

// -2 Re sum_i w_i conj(G_x(k_i)) f_i.
Field discrete_potential(const ModeSet& modes, const Eigen::VectorXcd& f, const Grid3& g);

// Throws InvalidArgument("... increase coupling weights or modes") when the
// ground state spreads beyond (L/4)^2 along an axis carrying mode momenta, and
// ConvergenceError when the fixed point iteration stalls.
DiscretePekarSolution solve_discrete_pekar(const Grid3& g, const ModeSet& modes, const DiscretePekarOptions& opts = {},
                                           const std::optional<Field>& init = std::nullopt);

// delta G_x(k_i) = G_x(k_i) - f0_i.
Field delta_coupling_field(const DiscretePekarSolution& sol, int i);

// <x_a^2> under |phi|^2 for a = 0, 1, 2.
std::vector<double> axis_spread(const Field& phi);

// phi <- (phi + phi(-x)) / 2, renormalized.
Field parity_symmetrize(const Field& phi);

}  // namespace polaron
