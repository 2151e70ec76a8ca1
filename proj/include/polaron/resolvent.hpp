// resolvent.hpp: h^{phi0}, the projectors P = |phi0><phi0|, Q = 1 - P, and
// the restricted resolvent R = Q (h^{phi0} - lambda)^{-1} Q

#pragma once

#include "polaron/pekar.hpp"

namespace polaron {

struct SpectralGap {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double gap = 0.0;
};

// Two lowest eigenvalues of h^{phi0}. Throws InvariantError when gap <= 0 or
// when lambda0 disagrees with sol.lambda by more than 1e-6.
SpectralGap spectral_gap(const PekarSolution& sol, double tol = 1e-10);

struct ResolventOptions {
    double cg_tol = 1e-10;  // relative to ||Q v||
    int cg_max_iter = 5000;
};

class Resolvent {
public:
    // Computes the gap on construction.
    Resolvent(const PekarSolution& sol, ResolventOptions opts = {});

    Field apply(const Field& v) const;     // R v
    Field apply_h(const Field& f) const;   // h^{phi0} f
    Field project_q(const Field& f) const; // Q f

    double lambda() const noexcept { return lambda_; }
    double gap() const noexcept { return gap_.gap; }
    const SpectralGap& spectrum() const noexcept { return gap_; }
    const Field& phi0() const noexcept { return phi0_; }
    int last_iterations() const noexcept { return last_iterations_; }

private:
    Field phi0_;
    Field V_;
    double lambda_;
    ResolventOptions opts_;
    SpectralGap gap_;
    double precond_shift_;
    mutable int last_iterations_ = 0;
};

}  // namespace polaron
