// pekar.hpp: continuum-style Pekar minimizer on the periodic grid
//
// Energy functional E(phi) = T - D/2 with T = <phi, p^2 phi> and
// D = <|phi|^2, |phi|^2 * 1/|x|>. The mean-field operator is
// h^phi = p^2 + V with V = -|phi|^2 * 1/|x|, and lambda = <phi, h^phi phi> = T - D.

#pragma once

#include "polaron/grid.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

namespace polaron {

struct PekarEnergy {
    double T = 0.0;
    double D = 0.0;
    double E = 0.0;
};

// Throws InvalidArgument unless |phi| = 1 to 1e-8.
PekarEnergy pekar_energy(const Field& phi, CoulombBoundary boundary = CoulombBoundary::isolated);

// Width of the best normalized Gaussian exp(-r^2 / (2 sigma^2)) for this functional.
double optimal_gaussian_width();

struct PekarOptions {
    double step = 1.0;             // initial step along the preconditioned gradient
    double tol = 1e-6;             // on ||(h - lambda) phi||
    int max_iter = 20000;
    double precond_shift = 0.1;    // preconditioner (p^2 + shift)^{-1}
    int memory = 10;               // nonmonotone window
    CoulombBoundary coulomb = CoulombBoundary::isolated;
};

struct PekarSolution {
    Field phi0;
    double T = 0.0;
    double D = 0.0;
    double energy = 0.0;
    double lambda = 0.0;
    Field V_eff;
    double gap = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    double tail_mass = 0.0;  // mass of phi0 outside radius L/4
    int iterations = 0;
    CoulombBoundary coulomb = CoulombBoundary::isolated;
    std::vector<double> energy_trace;

    explicit PekarSolution(const Grid3& g) : phi0(g), V_eff(g) {}
};

// h f = p^2 f + V f.
Field apply_h(const Field& f, const Field& V);

// -|phi|^2 * 1/|x|.
Field mean_field_potential(const Field& phi, CoulombBoundary boundary = CoulombBoundary::isolated);

// Same potential assembled as -2 Re sum_k conj(G_x(k)) f0(k) dk over all grid
// wavevectors, with the kernel matching `boundary`.
Field mean_field_potential_from_f0(const Field& phi, CoulombBoundary boundary = CoulombBoundary::isolated);

PekarSolution minimize_pekar(const Grid3& grid, const std::optional<Field>& init, const PekarOptions& opts = {});

// rho_hat(k) = integral e^{-ikx} |phi|^2 dx for a commensurate k.
cd density_fourier(const Field& phi, const Vec3& k);

// f0(k) = rho_hat(k) / (2 pi |k|). Rejects k = 0 and non-commensurate k.
cd coupling_f0(const PekarSolution& sol, const Vec3& k);

// phi0.pfld, veff.pfld, scalars.json.
void save_solution(const PekarSolution& sol, const std::filesystem::path& dir);
PekarSolution load_solution(const std::filesystem::path& dir);

}  // namespace polaron
