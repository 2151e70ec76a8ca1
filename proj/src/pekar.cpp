#include "polaron/pekar.hpp"

#include "polaron/errors.hpp"
#include "polaron/fft.hpp"
#include "polaron/pfld.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <numbers>

namespace polaron {
namespace {

constexpr double pi = std::numbers::pi;

void require_normalized(const Field& phi, const char* where) {
    if (std::abs(phi.norm() - 1.0) > 1e-8) {
        throw InvalidArgument(std::string(where) + ": input must be normalized");
    }
}

// Real part of <f, g>.
double dot(const Field& f, const Field& g) { return inner(f, g).real(); }

struct Evaluation {
    PekarEnergy energy;
    Field V;
    Field gradient;  // (h - lambda) phi
    double lambda = 0.0;
    double residual = 0.0;

    explicit Evaluation(const Grid3& g) : V(g), gradient(g) {}
};

Evaluation evaluate(const Field& phi, CoulombBoundary boundary) {
    Evaluation ev(phi.grid);
    const Field p2phi = apply_laplacian(phi);
    ev.V = mean_field_potential(phi, boundary);
    const Field vphi(phi.grid, ev.V.values.cwiseProduct(phi.values));
    ev.energy.T = dot(phi, p2phi);
    ev.energy.D = -dot(phi, vphi);
    ev.energy.E = ev.energy.T - 0.5 * ev.energy.D;
    ev.lambda = ev.energy.T - ev.energy.D;
    ev.gradient.values = p2phi.values + vphi.values - ev.lambda * phi.values;
    ev.gradient.values = ev.gradient.values.real().cast<cd>();
    ev.residual = ev.gradient.norm();
    return ev;
}

Field normalized_real(const Field& f) {
    Field out(f.grid, f.values.real().cast<cd>());
    const double nrm = out.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidArgument("minimize_pekar: initial field has zero norm");
    out.values /= nrm;
    return out;
}

void fix_sign(Field& phi) {
    if (phi.values.real().sum() < 0.0) phi.values = -phi.values;
}

const char* boundary_name(CoulombBoundary b) { return b == CoulombBoundary::isolated ? "isolated" : "jellium"; }

}  // namespace

double optimal_gaussian_width() { return 6.0 * std::sqrt(pi / 2.0); }

Field apply_h(const Field& f, const Field& V) {
    require_same_grid(f, V, "apply_h");
    Field out = apply_laplacian(f);
    out.values += V.values.cwiseProduct(f.values);
    return out;
}

Field mean_field_potential(const Field& phi, CoulombBoundary boundary) {
    Field V = coulomb_convolve(density(phi), boundary);
    V.values = -V.values;
    return V;
}

Field mean_field_potential_from_f0(const Field& phi, CoulombBoundary boundary) {
    const Grid3& g = phi.grid;
    const int n = g.n();
    const double dk3 = std::pow(g.wavenumber_unit(), 3);
    const double R = 0.5 * g.box_length();
    const Eigen::VectorXd& k2 = fft::k_squared(g);

    Eigen::VectorXcd work = density(phi).values;
    fft::forward(n, work);
    for (Eigen::Index i = 0; i < work.size(); ++i) {
        const auto [a, b, c] = g.unflatten(i);
        // e^{-i k x_j} = e^{-i k j dx} (-1)^m because x_j is offset by n/2 cells.
        const double parity = ((g.frequency(a) + g.frequency(b) + g.frequency(c)) % 2 == 0) ? 1.0 : -1.0;
        double coupling = 0.0;  // |G_x(k)|
        if (boundary == CoulombBoundary::isolated) {
            const double vhat = k2[i] == 0.0 ? 2.0 * pi * R * R : 4.0 * pi * (1.0 - std::cos(std::sqrt(k2[i]) * R)) / k2[i];
            coupling = std::sqrt(vhat / (4.0 * pi)) / (2.0 * pi);
        } else if (k2[i] != 0.0) {
            coupling = 1.0 / (2.0 * pi * std::sqrt(k2[i]));
        }
        const cd rho_hat = g.cell_volume() * parity * work[i];
        const cd f0 = coupling * rho_hat;
        work[i] = parity * coupling * f0;
    }
    fft::backward(n, work);
    return Field(g, (-2.0 * dk3 * work.real()).cast<cd>());
}

PekarEnergy pekar_energy(const Field& phi, CoulombBoundary boundary) {
    require_normalized(phi, "pekar_energy");
    return evaluate(phi, boundary).energy;
}

PekarSolution minimize_pekar(const Grid3& grid, const std::optional<Field>& init, const PekarOptions& opts) {
    if (init && init->grid != grid) throw InvalidArgument("minimize_pekar: init grid mismatch");
    Field phi = init ? normalized_real(*init) : gaussian(grid, optimal_gaussian_width());

    auto precondition = [&](const Field& f) {
        Field out = apply_shifted_inverse_laplacian(f, opts.precond_shift);
        out.values = out.values.real().cast<cd>();
        return out;
    };
    // Preconditioned gradient projected onto the tangent space at phi.
    auto direction = [&](const Field& phi_now, const Field& grad) {
        Field d = precondition(grad);
        const Field pphi = precondition(phi_now);
        d.values -= (dot(phi_now, d) / dot(phi_now, pphi)) * pphi.values;
        return d;
    };
    auto retract = [](const Field& base, const Field& d, double tau) {
        Field out(base.grid, base.values - tau * d.values);
        out.values /= out.norm();
        return out;
    };

    PekarSolution sol(grid);
    sol.coulomb = opts.coulomb;
    Evaluation ev = evaluate(phi, opts.coulomb);
    Field d = direction(phi, ev.gradient);
    std::deque<double> recent{ev.energy.E};
    double tau = opts.step;
    std::optional<Field> prev_phi, prev_d;
    bool recentred_at_end = false;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (!std::isfinite(ev.energy.E)) throw ConvergenceError("minimize_pekar: energy collapsed to NaN", ev.residual);
        sol.energy_trace.push_back(ev.energy.E);
        if (ev.residual <= opts.tol) {
            const Vec3 com = centre_of_mass(phi);
            if (com.norm() <= 1e-6 * grid.dx() || recentred_at_end) break;
            // Converged off-centre: shift to the box centre and polish again.
            phi = translate(phi, -com);
            phi.values = phi.values.real().cast<cd>();
            phi.values /= phi.norm();
            ev = evaluate(phi, opts.coulomb);
            d = direction(phi, ev.gradient);
            prev_phi.reset();
            recentred_at_end = true;
            continue;
        }
        if (it > 0 && it % 100 == 0) {
            const Vec3 com = centre_of_mass(phi);
            if (com.norm() > 1e-3 * grid.dx()) {
                phi = translate(phi, -com);
                phi.values = phi.values.real().cast<cd>();
                phi.values /= phi.norm();
                ev = evaluate(phi, opts.coulomb);
                d = direction(phi, ev.gradient);
                prev_phi.reset();
            }
        }

        if (prev_phi) {
            const Field s(grid, phi.values - prev_phi->values);
            const Field y(grid, d.values - prev_d->values);
            const double sy = dot(s, y);
            if (sy > 0.0) tau = std::clamp(dot(s, s) / sy, 1e-3 * opts.step, 1e3 * opts.step);
        }
        const double reference = *std::max_element(recent.begin(), recent.end());
        Field trial = retract(phi, d, tau);
        Evaluation trial_ev = evaluate(trial, opts.coulomb);
        int halvings = 0;
        while (!(trial_ev.energy.E <= reference + 1e-14 * std::abs(reference))) {
            if (++halvings > 40) throw ConvergenceError("minimize_pekar: line search failed", ev.residual);
            tau *= 0.5;
            trial = retract(phi, d, tau);
            trial_ev = evaluate(trial, opts.coulomb);
        }
        prev_phi = phi;
        prev_d = d;
        phi = std::move(trial);
        ev = std::move(trial_ev);
        d = direction(phi, ev.gradient);
        recent.push_back(ev.energy.E);
        if (int(recent.size()) > opts.memory) recent.pop_front();
    }
    if (ev.residual > opts.tol) {
        throw ConvergenceError("minimize_pekar: no convergence in " + std::to_string(it) + " iterations", ev.residual);
    }

    fix_sign(phi);
    sol.phi0 = phi;
    sol.T = ev.energy.T;
    sol.D = ev.energy.D;
    sol.energy = sol.T - 0.5 * sol.D;
    sol.lambda = sol.T - sol.D;
    sol.V_eff = ev.V;
    sol.residual = ev.residual;
    sol.iterations = it;
    sol.tail_mass = mass_outside(phi, 0.25 * grid.box_length());
    if (sol.tail_mass > 1e-6) {
        std::cerr << "warning: minimize_pekar: mass " << sol.tail_mass
                  << " outside radius L/4; increase box_length\n";
    }
    return sol;
}

cd density_fourier(const Field& phi, const Vec3& k) {
    const Grid3& g = phi.grid;
    cd acc = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        acc += std::norm(phi.values[i]) * std::polar(1.0, -k.dot(g.position(i)));
    }
    return acc * g.cell_volume();
}

cd coupling_f0(const PekarSolution& sol, const Vec3& k) {
    if (k.norm() == 0.0) throw InvalidArgument("coupling_f0: k = 0 is singular");
    if (!sol.phi0.grid.is_commensurate(k)) throw InvalidArgument("coupling_f0: k is not a reciprocal lattice vector");
    return density_fourier(sol.phi0, k) / (2.0 * pi * k.norm());
}

void save_solution(const PekarSolution& sol, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    pfld::save_field(sol.phi0, dir / "phi0.pfld", "phi0");
    pfld::save_field(sol.V_eff, dir / "veff.pfld", "veff");
    nlohmann::json j;
    j["T"] = sol.T;
    j["D"] = sol.D;
    j["E"] = sol.energy;
    j["lambda"] = sol.lambda;
    j["residual"] = sol.residual;
    j["gap"] = std::isfinite(sol.gap) ? nlohmann::json(sol.gap) : nlohmann::json(nullptr);
    j["tail_mass"] = sol.tail_mass;
    j["iterations"] = sol.iterations;
    j["grid_n"] = sol.phi0.grid.n();
    j["box_length"] = sol.phi0.grid.box_length();
    j["coulomb"] = boundary_name(sol.coulomb);
    std::ofstream out(dir / "scalars.json");
    if (!out) throw IoError("save_solution: cannot write scalars.json in " + dir.string());
    out << j.dump(2) << '\n';
}

PekarSolution load_solution(const std::filesystem::path& dir) {
    std::ifstream in(dir / "scalars.json");
    if (!in) throw IoError("load_solution: missing scalars.json in " + dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("load_solution: bad scalars.json: ") + e.what());
    }
    const Grid3 grid(j.at("grid_n").get<int>(), j.at("box_length").get<double>());
    PekarSolution sol(grid);
    sol.phi0 = pfld::load_field(dir / "phi0.pfld", grid);
    sol.V_eff = pfld::load_field(dir / "veff.pfld", grid);
    sol.T = j.at("T");
    sol.D = j.at("D");
    sol.energy = j.at("E");
    sol.lambda = j.at("lambda");
    sol.residual = j.at("residual");
    if (!j.at("gap").is_null()) sol.gap = j.at("gap");
    sol.tail_mass = j.value("tail_mass", 0.0);
    sol.iterations = j.value("iterations", 0);
    sol.coulomb = j.value("coulomb", "isolated") == "jellium" ? CoulombBoundary::jellium : CoulombBoundary::isolated;
    return sol;
}

}  // namespace polaron
