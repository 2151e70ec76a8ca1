#include "polaron/experiments.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace polaron {
namespace {

DiscretePekarSolution solve_toy(const Grid3& g, const ModeSet& modes, const RunConfig& cfg) {
    require_commensurate(modes, g);
    DiscretePekarOptions o;
    o.damping = cfg.damping;
    o.tol = cfg.sc_tol;
    return solve_discrete_pekar(g, modes, o);
}

KrylovOptions krylov_options(const RunConfig& cfg) {
    KrylovOptions ko;
    ko.krylov_dim = cfg.krylov_dim;
    ko.tol = cfg.krylov_tol;
    return ko;
}

void accumulate(KrylovStats& total, const KrylovStats& s) {
    total.substeps += s.substeps;
    total.rejected += s.rejected;
    total.applications += s.applications;
    total.error_estimate += s.error_estimate;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y, double* rms = nullptr) {
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    if (rms) {
        double r = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = y[i] - (my + slope * (x[i] - mx));
            r += d * d;
        }
        *rms = std::sqrt(r / n);
    }
    return slope;
}

std::size_t closest(const std::vector<CompareRow>& rows, double tau) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::abs(rows[i].tau - tau) < std::abs(rows[best].tau - tau)) best = i;
    }
    return best;
}

}  // namespace

ToyModel::ToyModel(const RunConfig& cfg)
    : grid(cfg.grid_n, cfg.box_length),
      modes(mode_preset(cfg.modes, cfg.weight)),
      sol(solve_toy(grid, modes, cfg)),
      resolvent(std::make_shared<const Resolvent>(sol, ResolventOptions{cfg.cg_tol, 5000})),
      kernels(build_kernels(sol, modes, *resolvent)),
      diagnostics(diagnose(kernels, resolvent->gap())) {
    sol.gap = resolvent->gap();
}

Eigen::VectorXcd initial_fock_state(const FockSpace& fs, const ModeSet& modes, const RunConfig& cfg) {
    if (cfg.initial_state == "vacuum") return fock_vacuum(fs);
    if (fs.modes() != modes.size()) throw InvalidArgument("initial_fock_state: mode count mismatch");
    const double th = std::tanh(cfg.squeeze);
    Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(fs.dim());
    for (Eigen::Index s = 0; s < fs.dim(); ++s) {
        double amp = 1.0;
        for (int i = 0; i < modes.size() && amp != 0.0; ++i) {
            const int j = modes.partner[std::size_t(i)];
            if (j < i) continue;
            const int n = fs.occupation(s, i);
            amp = fs.occupation(s, j) == n ? amp * std::pow(th, n) : 0.0;
        }
        eta[s] = amp;
    }
    return eta / eta.norm();
}

QuasiFreeState initial_quasifree_state(const ModeSet& modes, const RunConfig& cfg) {
    if (cfg.initial_state == "vacuum") return vacuum_state(modes.size());
    return squeezed_vacuum(modes, cfg.squeeze);
}

double coupled_memory_mb(const Grid3& g, const FockSpace& fs, int krylov_dim) {
    const double vec = double(g.size()) * double(fs.dim()) * sizeof(cd);
    return vec * (krylov_dim + 8) / (1024.0 * 1024.0);
}

CompareResult run_compare(const ToyModel& model, const RunConfig& cfg, double alpha, int n_max) {
    if (!(alpha > 0.0)) throw InvalidArgument("run_compare: alpha must be positive");
    const FockSpace fs(model.modes.size(), n_max);
    const double mb = coupled_memory_mb(model.grid, fs, cfg.krylov_dim);
    if (mb > cfg.memory_limit_mb) {
        std::ostringstream os;
        os << "run_compare: estimated " << mb << " MB exceeds memory_limit_mb = " << cfg.memory_limit_mb
           << "; reduce n_max, modes or grid_n";
        throw InvalidArgument(os.str());
    }

    const FullHamiltonian H(model.sol, alpha, fs);
    const SparseMat Hq = build_quadratic_hamiltonian(model.kernels, fs);
    const double eps = model.kernels.epsilon;
    const double inv_a2 = 1.0 / (alpha * alpha);
    const LinearOp quad = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = inv_a2 * (Hq * x - eps * x); };
    const LinearOp full = H.op();
    const KrylovOptions ko = krylov_options(cfg);

    std::vector<Field> active;
    for (int j = 0; j < model.modes.size(); ++j) {
        Field b(model.grid, plane_wave(model.grid, -model.modes.k[std::size_t(j)]).values.cwiseProduct(model.sol.phi0.values));
        Field u = model.resolvent->apply(b);
        const double nu = u.norm();
        if (nu > 0) active.push_back(Field(model.grid, u.values / nu));
    }

    Eigen::VectorXcd eta = initial_fock_state(fs, model.modes, cfg);
    const Eigen::VectorXcd psi0 = product_state(model.sol.phi0, eta);
    Eigen::VectorXcd psi = psi0;
    Eigen::VectorXcd work;
    full(psi0, work);
    const double E0 = coupled_inner(psi0, work, model.grid).real();

    CompareResult res;
    res.alpha = alpha;
    res.n_max = n_max;
    double t_prev = 0.0;
    for (double tau : tau_schedule(cfg.tau_final, cfg.tau_steps)) {
        const double t = tau * alpha * alpha;
        if (t > t_prev) {
            KrylovStats s1, s2;
            psi = expm_multiply(full, psi, t - t_prev, ko, &s1);
            eta = expm_multiply(quad, eta, t - t_prev, ko, &s2);
            accumulate(res.stats, s1);
            accumulate(res.stats, s2);
            t_prev = t;
        }
        CompareRow r;
        r.t = t;
        r.tau = tau;
        const Eigen::VectorXcd xi = product_state(model.sol.phi0, eta);
        r.err_effective = coupled_norm(psi - xi, model.grid);
        r.err_phase_only = coupled_norm(psi - psi0, model.grid);
        r.N_full = coupled_number(psi, model.grid, fs);
        r.N_eff = number_expectation(eta, fs);
        const ElectronDistance d = electron_distance(psi, model.sol.phi0, active);
        r.trace_distance = d.trace_distance;
        r.compressed_distance = d.compressed_distance;
        r.active_weight = d.active_weight;
        r.top_level = coupled_top_level(psi, model.grid, fs);
        r.top_level_eff = top_level_population(eta, fs);
        r.norm_drift = std::abs(coupled_norm(psi, model.grid) - 1.0);
        full(psi, work);
        r.energy = coupled_inner(psi, work, model.grid).real();
        res.max_norm_drift = std::max(res.max_norm_drift, r.norm_drift);
        res.max_energy_drift = std::max(res.max_energy_drift, std::abs(r.energy - E0));
        res.max_top_level = std::max({res.max_top_level, r.top_level, r.top_level_eff});
        res.rows.push_back(r);
        if (res.max_top_level > cfg.top_level_tol) {
            std::ostringstream os;
            os << "truncation monitor: top-level population " << res.max_top_level << " at tau = " << tau
               << " exceeds top_level_tol = " << cfg.top_level_tol << " (alpha = " << alpha << ", n_max = " << n_max
               << "); increase n_max";
            throw InvariantError(os.str());
        }
    }
    res.final_state = std::move(psi);
    return res;
}

ScalingFit fit_scaling(const std::vector<CompareResult>& runs, double tau_fit) {
    if (runs.size() < 3) throw InvalidArgument("fit_scaling: need at least three alpha values");
    ScalingFit fit;
    fit.tau_fit = tau_fit;
    std::vector<double> la, le, lp;
    fit.effective_beats_phase = true;
    for (const auto& run : runs) {
        const CompareRow& r = run.rows.at(closest(run.rows, tau_fit));
        if (!(r.err_effective > 0.0) || !(r.err_phase_only > 0.0)) {
            throw InvalidArgument("fit_scaling: zero error at the fit time; choose tau_fit > 0");
        }
        fit.alphas.push_back(run.alpha);
        fit.err_effective.push_back(r.err_effective);
        fit.err_phase_only.push_back(r.err_phase_only);
        la.push_back(std::log(run.alpha));
        le.push_back(std::log(r.err_effective));
        lp.push_back(std::log(r.err_phase_only));
        fit.effective_beats_phase = fit.effective_beats_phase && r.err_effective < r.err_phase_only;
    }
    fit.p = -lsq_slope(la, le, &fit.p_residual);
    fit.p_phase = -lsq_slope(la, lp);

    // Envelope rate from the running maximum, intercepts removed per alpha.
    double sxy = 0, sxx = 0;
    for (const auto& run : runs) {
        std::vector<double> x, y;
        double running = -std::numeric_limits<double>::infinity();
        for (const auto& r : run.rows) {
            if (r.err_effective > 0.0) running = std::max(running, std::log(run.alpha * r.err_effective));
            if (r.tau < 0.1 || !std::isfinite(running)) continue;
            x.push_back(r.tau);
            y.push_back(running);
        }
        if (x.size() < 2) continue;
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i] / double(x.size());
            my += y[i] / double(x.size());
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
    }
    fit.c = sxx > 0 ? sxy / sxx : 0.0;
    for (const auto& run : runs) {
        for (const auto& r : run.rows) fit.C = std::max(fit.C, run.alpha * r.err_effective * std::exp(-fit.c * r.tau));
    }
    fit.envelope_holds = true;
    for (const auto& run : runs) {
        for (const auto& r : run.rows) {
            const double bound = fit.C / run.alpha * std::exp(fit.c * r.tau);
            fit.envelope_holds = fit.envelope_holds && r.err_effective <= bound * (1 + 1e-12);
        }
    }
    return fit;
}

BogoliubovReport run_bogoliubov_check(const KernelPair& kp, const RunConfig& cfg, double alpha) {
    const Generator gen = build_generator(kp);
    const QuasiFreeState s0 = initial_quasifree_state(kp.modes, cfg);
    const KrylovOptions ko = krylov_options(cfg);
    const auto taus = tau_schedule(cfg.bog_tau_final, cfg.bog_tau_steps);

    std::vector<QuasiFreeState> exact;
    for (double tau : taus) exact.push_back(evolve_quasifree(s0, propagate_map(gen, tau * alpha * alpha, alpha)));

    BogoliubovReport rep;
    for (int n_max : cfg.n_max_scan) {
        const FockSpace fs(kp.modes.size(), n_max);
        const SparseMat Hq = build_quadratic_hamiltonian(kp, fs);
        const double inv_a2 = 1.0 / (alpha * alpha);
        const LinearOp quad = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
            y = inv_a2 * (Hq * x - kp.epsilon * x);
        };
        Eigen::VectorXcd eta = initial_fock_state(fs, kp.modes, cfg);
        double t_prev = 0.0;
        double worst = 0.0;
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double t = taus[k] * alpha * alpha;
            if (t > t_prev) {
                eta = expm_multiply(quad, eta, t - t_prev, ko);
                t_prev = t;
            }
            const QuasiFreeState s = reduced_densities(eta, fs);
            BogoliubovRow r;
            r.n_max = n_max;
            r.t = t;
            r.tau = taus[k];
            r.gamma_dev = (s.gamma - exact[k].gamma).norm();
            r.pairing_dev = (s.pairing - exact[k].pairing).norm();
            r.N_fock = number_expectation(eta, fs);
            r.N_quasifree = expected_number(exact[k]);
            r.top_level = top_level_population(eta, fs);
            worst = std::max({worst, r.gamma_dev, r.pairing_dev});
            rep.rows.push_back(r);
        }
        rep.max_dev.push_back(worst);
    }
    for (std::size_t i = 1; i < rep.max_dev.size(); ++i) {
        if (!(rep.max_dev[i] < rep.max_dev[i - 1] || rep.max_dev[i] < 1e-13)) rep.monotone = false;
    }
    return rep;
}

std::vector<NumberRow> number_curve(const Generator& gen, const QuasiFreeState& s0, double alpha,
                                    const std::vector<double>& taus) {
    std::vector<NumberRow> rows;
    for (double tau : taus) {
        const BogoliubovMap map = propagate_map(gen, tau * alpha * alpha, alpha);
        const QuasiFreeState s = evolve_quasifree(s0, map);
        rows.push_back({tau * alpha * alpha, tau, expected_number(s), purity_defect(s), map.symplectic_defect});
    }
    return rows;
}

GronwallFit fit_gronwall(const std::vector<NumberRow>& rows) {
    if (rows.size() < 3 || rows.front().tau != 0.0) throw InvalidArgument("fit_gronwall: need a curve starting at tau = 0");
    GronwallFit fit;
    fit.N0 = rows.front().N;
    const double L0 = std::log1p(fit.N0);
    for (const auto& r : rows) {
        if (r.tau > 0) fit.c = std::max(fit.c, (std::log1p(r.N) - L0) / r.tau);
    }
    fit.bound_holds = true;
    for (const auto& r : rows) {
        const double bound = (fit.N0 + 1.0) * std::exp(fit.c * r.tau) - 1.0;
        fit.bound_holds = fit.bound_holds && r.N <= bound + 1e-12 * (1.0 + bound);
    }
    fit.bound_holds = fit.bound_holds && std::isfinite(fit.c);

    // Compare the growth rate of log(N + 1) on each half of the window.
    const double half = rows.back().tau / 2;
    double peak_first = L0;
    for (const auto& r : rows) {
        if (r.tau > half) break;
        peak_first = std::max(peak_first, std::log1p(r.N));
        if (r.tau > 0) fit.early_rate = std::max(fit.early_rate, (std::log1p(r.N) - L0) / r.tau);
    }
    for (const auto& r : rows) {
        if (r.tau <= half) continue;
        fit.late_rate = std::max(fit.late_rate, (std::log1p(r.N) - peak_first) / (r.tau - half));
    }
    fit.super_exponential = fit.late_rate > 2.0 * fit.early_rate + 1e-3;
    return fit;
}

void write_csv(const std::filesystem::path& path, const std::string& units, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path.string());
    std::fprintf(f, "# %s\n", units.c_str());
    for (std::size_t i = 0; i < columns.size(); ++i) std::fprintf(f, "%s%s", i ? "," : "", columns[i].c_str());
    std::fprintf(f, "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size()) {
            std::fclose(f);
            throw InvalidArgument("write_csv: row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) std::fprintf(f, "%s%.17g", i ? "," : "", row[i]);
        std::fprintf(f, "\n");
    }
    if (std::fclose(f) != 0) throw IoError("write failed for " + path.string());
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, std::vector<std::string>* columns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (header.empty()) {
            while (std::getline(ss, cell, ',')) header.push_back(cell);
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != header.size()) throw IoError("malformed row in " + path.string());
        rows.push_back(std::move(row));
    }
    if (columns) *columns = header;
    return rows;
}

}  // namespace polaron
