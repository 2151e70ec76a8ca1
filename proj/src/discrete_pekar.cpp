#include "polaron/discrete_pekar.hpp"

#include "polaron/eigensolver.hpp"
#include "polaron/errors.hpp"

#include <cmath>

namespace polaron {
namespace {

// Rotates a complex eigenvector to be real with positive sum.
Field real_positive(const Grid3& g, const Eigen::VectorXcd& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cd phase = std::conj(v[imax]) / std::abs(v[imax]);
    Field out(g, (v * phase).real().cast<cd>());
    if (out.values.real().sum() < 0.0) out.values = -out.values;
    out.values /= out.norm();
    return out;
}

}  // namespace

Eigen::VectorXcd discrete_f0(const ModeSet& modes, const Field& phi) {
    Eigen::VectorXcd f(modes.size());
    for (int i = 0; i < modes.size(); ++i) f[i] = inner(phi, Field(phi.grid, coupling_field(modes, i, phi.grid).values.cwiseProduct(phi.values)));
    return f;
}

Field discrete_potential(const ModeSet& modes, const Eigen::VectorXcd& f, const Grid3& g) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(g.size());
    for (int i = 0; i < modes.size(); ++i) {
        acc += modes.w[std::size_t(i)] * coupling_field(modes, i, g).values.conjugate() * f[i];
    }
    return Field(g, (-2.0 * acc.real()).cast<cd>());
}

std::vector<double> axis_spread(const Field& phi) {
    const Grid3& g = phi.grid;
    std::vector<double> s(3, 0.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Vec3 x = g.position(i);
        const double p = std::norm(phi.values[i]);
        for (int a = 0; a < 3; ++a) s[std::size_t(a)] += p * x[a] * x[a];
    }
    for (double& v : s) v *= g.cell_volume();
    return s;
}

Field parity_symmetrize(const Field& phi) {
    const Grid3& g = phi.grid;
    Field out(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) out.values[i] = 0.5 * (phi.values[i] + phi.values[g.mirror(i)]);
    out.values /= out.norm();
    return out;
}

DiscretePekarSolution solve_discrete_pekar(const Grid3& g, const ModeSet& modes, const DiscretePekarOptions& opts,
                                           const std::optional<Field>& init) {
    require_commensurate(modes, g);
    if (opts.damping < 0.0 || opts.damping >= 1.0) throw InvalidArgument("solve_discrete_pekar: damping must lie in [0, 1)");

    Field phi = init ? *init : gaussian(g, g.box_length() / 8.0);
    if (init) {
        if (init->grid != g) throw InvalidArgument("solve_discrete_pekar: init grid mismatch");
        phi.values = phi.values.real().cast<cd>();
        phi = translate(phi, -centre_of_mass(phi));
    }
    phi = parity_symmetrize(Field(g, phi.values.real().cast<cd>()));

    DiscretePekarSolution sol(g, modes);
    // Parity symmetric real phi gives real f; dropping the roundoff imaginary
    // part keeps the potential exactly even.
    Eigen::VectorXcd f_used = discrete_f0(modes, phi).real().cast<cd>();
    Field V = discrete_potential(modes, f_used, g);
    const double dV = g.cell_volume();

    EigenOptions eo;
    eo.num = 1;
    eo.extra = 3;
    eo.tol = opts.eig_tol;
    auto energy_of = [&](const Field& p) {
        const Eigen::VectorXcd f = discrete_f0(modes, p);
        double fw = 0.0;
        for (int i = 0; i < modes.size(); ++i) fw += modes.w[std::size_t(i)] * std::norm(f[i]);
        return inner(p, apply_laplacian(p)).real() - fw;
    };
    sol.energy_trace.push_back(energy_of(phi));

    double change = 0.0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const LinearOp op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
            y = apply_h(Field(g, x), V).values;
        };
        const Eigen::MatrixXcd guess = phi.values * std::sqrt(dV);
        const EigenResult er = lowest_eigenpairs(op, g.size(), eo, guess);
        phi = parity_symmetrize(real_positive(g, er.vectors.col(0)));
        sol.energy_trace.push_back(energy_of(phi));

        const Eigen::VectorXcd f_new = discrete_f0(modes, phi).real().cast<cd>();
        change = (f_new - f_used).cwiseAbs().maxCoeff();
        f_used = (1.0 - opts.damping) * f_new + opts.damping * f_used;
        V = discrete_potential(modes, f_used, g);
        if (change <= opts.tol) break;
    }
    if (change > opts.tol) {
        throw ConvergenceError("solve_discrete_pekar: self-consistency not reached in " + std::to_string(it) + " iterations",
                               change);
    }

    sol.axis_spread = axis_spread(phi);
    const double limit = std::pow(0.25 * g.box_length(), 2);
    for (int a : active_axes(modes)) {
        if (sol.axis_spread[std::size_t(a)] > limit) {
            throw InvalidArgument("solve_discrete_pekar: ground state not bound along axis " + std::to_string(a) +
                                  "; increase coupling weights or modes");
        }
    }

    sol.phi0 = phi;
    sol.f0 = discrete_f0(modes, phi);
    sol.f0 = sol.f0.real().cast<cd>();
    sol.V_eff = discrete_potential(modes, sol.f0, g);
    sol.sc_residual = change;
    double fw = 0.0;
    for (int i = 0; i < modes.size(); ++i) fw += modes.w[std::size_t(i)] * std::norm(sol.f0[i]);
    sol.T = inner(phi, apply_laplacian(phi)).real();
    sol.D = 2.0 * fw;
    sol.energy = sol.T - 0.5 * sol.D;
    sol.lambda = sol.T - sol.D;
    Field r = apply_h(phi, sol.V_eff);
    r.values -= sol.lambda * phi.values;
    sol.residual = r.norm();
    sol.iterations = it + 1;
    sol.tail_mass = mass_outside(phi, 0.25 * g.box_length());
    return sol;
}

Field delta_coupling_field(const DiscretePekarSolution& sol, int i) {
    Field out = coupling_field(sol.modes, i, sol.phi0.grid);
    out.values.array() -= sol.f0[i];
    return out;
}

}  // namespace polaron
