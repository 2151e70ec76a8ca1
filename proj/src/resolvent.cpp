#include "polaron/resolvent.hpp"

#include "polaron/eigensolver.hpp"
#include "polaron/errors.hpp"

#include <cmath>

namespace polaron {

SpectralGap spectral_gap(const PekarSolution& sol, double tol) {
    const Grid3& g = sol.phi0.grid;
    const LinearOp op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        y = apply_h(Field(g, x), sol.V_eff).values;
    };
    EigenOptions eo;
    eo.num = 2;
    eo.extra = 4;
    eo.tol = tol;
    const double shift = std::max(0.1, -sol.lambda);
    const Preconditioner pc = [&](Eigen::VectorXcd& r, double) {
        r = apply_shifted_inverse_laplacian(Field(g, r), shift).values;
    };
    const Eigen::MatrixXcd guess = sol.phi0.values * std::sqrt(g.cell_volume());
    const EigenResult er = lowest_eigenpairs(op, g.size(), eo, guess, pc);
    SpectralGap out{er.values[0], er.values[1], er.values[1] - er.values[0]};
    if (std::abs(out.lambda0 - sol.lambda) > 1e-6) {
        throw InvariantError("spectral_gap: lowest eigenvalue " + std::to_string(out.lambda0) +
                             " disagrees with lambda " + std::to_string(sol.lambda));
    }
    if (!(out.gap > 0.0)) throw InvariantError("spectral_gap: no gap above the ground state");
    return out;
}

Resolvent::Resolvent(const PekarSolution& sol, ResolventOptions opts)
    : phi0_(sol.phi0), V_(sol.V_eff), lambda_(sol.lambda), opts_(opts), gap_(spectral_gap(sol)),
      precond_shift_(std::max(0.1, -sol.lambda)) {
    phi0_.values /= phi0_.norm();
}

Field Resolvent::apply_h(const Field& f) const { return polaron::apply_h(f, V_); }

Field Resolvent::project_q(const Field& f) const {
    Field out = f;
    out.values -= inner(phi0_, f) * phi0_.values;
    return out;
}

Field Resolvent::apply(const Field& v) const {
    require_same_grid(phi0_, v, "Resolvent::apply");
    const Grid3& g = phi0_.grid;
    const Field b = project_q(v);
    const double bnorm = b.norm();
    Field u(g);
    last_iterations_ = 0;
    // v along phi0 up to rounding
    if (bnorm <= 1e-13 * v.norm()) return u;

    auto op = [&](const Field& x) {
        Field y = apply_h(x);
        y.values -= lambda_ * x.values;
        return project_q(y);
    };
    auto precond = [&](const Field& r) { return project_q(apply_shifted_inverse_laplacian(r, precond_shift_)); };

    // Preconditioned CG on ran Q; every vector is re-projected to stop drift
    // along phi0.
    Field r = b;
    Field z = precond(r);
    Field p = z;
    cd rz = inner(r, z);
    double rnorm = r.norm();
    for (int it = 1; it <= opts_.cg_max_iter; ++it) {
        last_iterations_ = it;
        const Field Ap = op(p);
        const cd pAp = inner(p, Ap);
        if (!(pAp.real() > 0.0)) throw ConvergenceError("Resolvent::apply: operator not positive on ran Q", rnorm);
        const cd step = rz / pAp;
        u.values += step * p.values;
        r.values -= step * Ap.values;
        u = project_q(u);
        r = project_q(r);
        rnorm = r.norm();
        if (rnorm <= opts_.cg_tol * bnorm) {
            // Confirm with the true residual before returning.
            Field tr = op(u);
            tr.values = b.values - tr.values;
            if (tr.norm() <= opts_.cg_tol * bnorm) return u;
            // Recursive residual drifted: restart from the true one.
            r = tr;
            z = precond(r);
            p = z;
            rz = inner(r, z);
            continue;
        }
        z = precond(r);
        const cd rz_new = inner(r, z);
        p.values = z.values + (rz_new / rz) * p.values;
        p = project_q(p);
        rz = rz_new;
    }
    throw ConvergenceError("Resolvent::apply: CG stagnated", rnorm / bnorm);
}

}  // namespace polaron
