#include "polaron/commands.hpp"

#include "polaron/errors.hpp"
#include "polaron/experiments.hpp"
#include "polaron/fock.hpp"
#include "polaron/manifest.hpp"
#include "polaron/pfld.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>

namespace polaron {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* units_t = "t in strong-coupling units (hbar = 1, electron mass 1/2, phonon frequency 1), tau = t / alpha^2";

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    Manifest& manifest;
    fs::path out;

    void record(const fs::path& p) { manifest.output(p); }
    bool check(const std::string& name, double value, double threshold) {
        const bool ok = value <= threshold;
        manifest.check(name, ok, value, threshold);
        if (!ok) log << "  FAILED " << name << ": " << value << " > " << threshold << "\n";
        return ok;
    }
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ToyModel timed_model(Context& ctx) {
    StageTimer timer;
    ToyModel model(ctx.cfg);
    ctx.manifest.timing("toy_model", timer.seconds());
    ctx.manifest.value("lambda", model.sol.lambda);
    ctx.manifest.value("gap", model.resolvent->gap());
    ctx.manifest.value("epsilon", model.kernels.epsilon);
    ctx.log << "  toy model: lambda = " << model.sol.lambda << ", gap = " << model.resolvent->gap()
            << ", epsilon = " << model.kernels.epsilon << "\n";
    return model;
}

void solve_pekar_cmd(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Grid3 g(cfg.grid_n, cfg.box_length);
    PekarOptions o;
    o.tol = cfg.pekar_tol;
    o.max_iter = cfg.pekar_max_iter;
    o.precond_shift = cfg.precond_shift;
    o.coulomb = cfg.coulomb == "jellium" ? CoulombBoundary::jellium : CoulombBoundary::isolated;
    const double sigma = std::min(optimal_gaussian_width(), cfg.box_length / 8);

    StageTimer timer;
    PekarSolution sol = minimize_pekar(g, gaussian(g, sigma, Vec3::Zero()), o);
    ctx.manifest.timing("minimize", timer.seconds());
    StageTimer gap_timer;
    const SpectralGap gap = spectral_gap(sol);
    sol.gap = gap.gap;
    ctx.manifest.timing("spectral_gap", gap_timer.seconds());

    const fs::path dir = ctx.out / "pekar";
    save_solution(sol, dir);
    for (const char* f : {"phi0.pfld", "veff.pfld", "scalars.json"}) ctx.record(dir / f);

    const double virial_D = std::abs(sol.D - 4 * sol.T) / std::abs(sol.D);
    const double virial_lambda = std::abs(sol.lambda - 3 * sol.energy) / std::abs(sol.energy);
    const double bound = -1.0 / (12 * std::numbers::pi);
    json report{{"energy", sol.energy},       {"T", sol.T},
                {"D", sol.D},                 {"lambda", sol.lambda},
                {"gap", gap.gap},             {"lambda1", gap.lambda1},
                {"virial_D", virial_D},       {"virial_lambda", virial_lambda},
                {"gaussian_bound", bound},    {"residual", sol.residual},
                {"tail_mass", sol.tail_mass}, {"iterations", sol.iterations},
                {"coulomb", cfg.coulomb}};
    write_json(ctx.out / "virial.json", report);
    ctx.record(ctx.out / "virial.json");

    std::vector<std::vector<double>> trace;
    for (std::size_t i = 0; i < sol.energy_trace.size(); ++i) trace.push_back({double(i), sol.energy_trace[i]});
    write_csv(ctx.out / "energy_trace.csv", "energy in strong-coupling units per iteration", {"iteration", "energy"}, trace);
    ctx.record(ctx.out / "energy_trace.csv");

    ctx.log << "  E = " << sol.energy << ", lambda = " << sol.lambda << ", |D-4T|/D = " << virial_D
            << ", residual = " << sol.residual << ", tail = " << sol.tail_mass << "\n";
    ctx.check("energy_below_gaussian_bound", sol.energy - bound, 0.0);
    ctx.check("virial_D", virial_D, 1e-3);
    ctx.check("virial_lambda", virial_lambda, 1e-3);
    ctx.check("euler_lagrange_residual", sol.residual, 1e-6);
    ctx.check("tail_mass", sol.tail_mass, 1e-6);
}

void kernel_checks(Context& ctx, const ToyModel& m) {
    const KernelDiagnostics& d = m.diagnostics;
    ctx.check("k_symmetry", d.k_symmetry, 1e-10);
    ctx.check("g_hermiticity", d.g_hermiticity, 1e-10);
    ctx.check("k_imag", d.k_imag, 1e-8);
    ctx.check("g_imag", d.g_imag, 1e-8);
    ctx.check("epsilon_defect", d.epsilon_defect, 0.0);
    ctx.check("cross_route_diagonal", d.cross_route, 1e-8);
    ctx.check("gap_floor", 0.05 - m.resolvent->gap(), 0.0);
}

void build_kernels_cmd(Context& ctx) {
    const ToyModel m = timed_model(ctx);
    save_solution(m.sol, ctx.out / "discrete");
    save_kernels(m.kernels, ctx.out / "kernels");
    for (const char* f : {"phi0.pfld", "veff.pfld", "scalars.json"}) ctx.record(ctx.out / "discrete" / f);
    for (const char* f : {"kernels.json", "K.pfld", "G.pfld"}) ctx.record(ctx.out / "kernels" / f);

    const KernelDiagnostics& d = m.diagnostics;
    json diag{{"k_symmetry", d.k_symmetry},         {"g_hermiticity", d.g_hermiticity},
              {"k_imag", d.k_imag},                 {"g_imag", d.g_imag},
              {"k_parity", d.k_parity},             {"g_parity", d.g_parity},
              {"epsilon_defect", d.epsilon_defect}, {"cross_route", d.cross_route},
              {"min_g_diagonal", d.min_g_diagonal}, {"norm_bound_ratio", d.norm_bound_ratio},
              {"gap", m.resolvent->gap()},          {"lambda0", m.resolvent->spectrum().lambda0},
              {"lambda1", m.resolvent->spectrum().lambda1},
              {"sc_residual", m.sol.sc_residual},   {"axis_spread", m.sol.axis_spread}};
    write_json(ctx.out / "diagnostics.json", diag);
    ctx.record(ctx.out / "diagnostics.json");
    kernel_checks(ctx, m);
}

std::vector<CompareResult> compare_all(Context& ctx, const ToyModel& m, bool write_full) {
    std::vector<CompareResult> runs;
    for (double alpha : ctx.cfg.alphas) {
        StageTimer timer;
        CompareResult r = run_compare(m, ctx.cfg, alpha, ctx.cfg.n_max);
        ctx.manifest.timing("compare_alpha_" + alpha_label(alpha), timer.seconds());
        const auto& last = r.rows.back();
        ctx.log << "  alpha = " << alpha << ": err_effective = " << last.err_effective
                << ", err_phase_only = " << last.err_phase_only << ", top level = " << r.max_top_level
                << " (" << timer.seconds() << " s)\n";

        const std::string label = alpha_label(alpha);
        std::vector<std::vector<double>> rows, traj;
        for (const auto& x : r.rows) {
            rows.push_back({x.t, x.tau, x.err_effective, x.err_phase_only, x.N_full, x.N_eff});
            traj.push_back({x.t, x.norm_drift, x.energy, x.N_full, x.top_level});
        }
        const fs::path cmp = ctx.out / ("compare_alpha_" + label + ".csv");
        write_csv(cmp, units_t, {"t", "tau", "err_effective", "err_phase_only", "N_full", "N_eff"}, rows);
        ctx.record(cmp);
        if (write_full) {
            const fs::path tp = ctx.out / ("trajectory_alpha_" + label + ".csv");
            write_csv(tp, units_t, {"t", "norm_drift", "energy", "N_expectation", "top_level_population"}, traj);
            ctx.record(tp);
            const FockSpace fock(m.modes.size(), r.n_max);
            const Eigen::MatrixXcd snap =
                Eigen::Map<const Eigen::MatrixXcd>(r.final_state.data(), m.grid.size(), fock.dim());
            const fs::path sp = ctx.out / ("state_alpha_" + label + ".pfld");
            pfld::save_matrix(snap, sp, "coupled");
            ctx.record(sp);
        }
        ctx.check("norm_drift_alpha_" + label, r.max_norm_drift, 1e-9);
        ctx.check("energy_drift_alpha_" + label, r.max_energy_drift, 1e-8);
        ctx.check("initial_error_alpha_" + label, r.rows.front().err_effective, 0.0);
        runs.push_back(std::move(r));
    }
    return runs;
}

void compare_cmd(Context& ctx) {
    const ToyModel m = timed_model(ctx);
    compare_all(ctx, m, true);
}

void scan_alpha_cmd(Context& ctx) {
    if (ctx.cfg.alphas.size() < 3) throw InvalidArgument("scan-alpha: needs at least three alpha values");
    const ToyModel m = timed_model(ctx);
    const auto runs = compare_all(ctx, m, false);
    const ScalingFit fit = fit_scaling(runs, ctx.cfg.tau_final);

    // Same runs at n_max + 2, to see how much of the error is truncation.
    RunConfig finer = ctx.cfg;
    finer.n_max += 2;
    double sensitivity = 0.0;
    StageTimer timer;
    for (std::size_t a = 0; a < runs.size(); ++a) {
        const CompareResult r = run_compare(m, finer, runs[a].alpha, finer.n_max);
        for (std::size_t k = 0; k < r.rows.size(); ++k) {
            sensitivity = std::max(sensitivity, std::abs(r.rows[k].err_effective - runs[a].rows[k].err_effective));
        }
    }
    ctx.manifest.timing("truncation_rerun", timer.seconds());

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < fit.alphas.size(); ++i) {
        rows.push_back({fit.alphas[i], fit.tau_fit, fit.err_effective[i], fit.err_phase_only[i]});
    }
    write_csv(ctx.out / "scan.csv", units_t, {"alpha", "tau", "err_effective", "err_phase_only"}, rows);
    ctx.record(ctx.out / "scan.csv");
    json jf{{"tau_fit", fit.tau_fit},
            {"p", fit.p},
            {"p_residual", fit.p_residual},
            {"p_phase_only", fit.p_phase},
            {"c", fit.c},
            {"C", fit.C},
            {"effective_beats_phase_only", fit.effective_beats_phase},
            {"envelope_holds", fit.envelope_holds},
            {"truncation_sensitivity", sensitivity},
            {"n_max", ctx.cfg.n_max}};
    write_json(ctx.out / "fit.json", jf);
    ctx.record(ctx.out / "fit.json");
    ctx.manifest.value("fit", jf);
    ctx.log << "  p = " << fit.p << " (phase only " << fit.p_phase << "), c = " << fit.c << ", C = " << fit.C
            << ", n_max sensitivity = " << sensitivity << "\n";
}

void bogoliubov_cmd(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const ToyModel m = timed_model(ctx);
    const double alpha = cfg.alphas.front();

    StageTimer timer;
    const BogoliubovReport rep = run_bogoliubov_check(m.kernels, cfg, alpha);
    ctx.manifest.timing("fock_oracle", timer.seconds());
    std::vector<std::vector<double>> rows;
    for (const auto& r : rep.rows) {
        rows.push_back({double(r.n_max), r.t, r.tau, r.gamma_dev, r.pairing_dev, r.N_fock, r.N_quasifree, r.top_level});
    }
    write_csv(ctx.out / "bogoliubov.csv", units_t,
              {"n_max", "t", "tau", "gamma_dev", "pairing_dev", "N_fock", "N_quasifree", "top_level"}, rows);
    ctx.record(ctx.out / "bogoliubov.csv");
    for (std::size_t i = 0; i < rep.max_dev.size(); ++i) {
        ctx.log << "  n_max = " << cfg.n_max_scan[i] << ": max deviation " << rep.max_dev[i] << "\n";
        ctx.manifest.value("max_dev_n_max_" + std::to_string(cfg.n_max_scan[i]), rep.max_dev[i]);
    }
    ctx.check("deviation_decreases_with_n_max", rep.monotone ? 0.0 : 1.0, 0.0);

    const Generator gen = build_generator(m.kernels);
    const QuasiFreeState s0 = initial_quasifree_state(m.modes, cfg);
    const auto curve = number_curve(gen, s0, alpha, tau_schedule(cfg.number_tau_final, cfg.number_tau_steps));
    std::vector<std::vector<double>> nrows;
    double worst_purity = 0.0, worst_symp = 0.0;
    for (const auto& r : curve) {
        nrows.push_back({r.t, r.tau, r.N, r.purity_defect, r.symplectic_defect});
        worst_purity = std::max(worst_purity, r.purity_defect);
        worst_symp = std::max(worst_symp, r.symplectic_defect);
    }
    write_csv(ctx.out / "number_curve.csv", units_t, {"t", "t_over_alpha2", "N", "purity_defect", "symplectic_defect"},
              nrows);
    ctx.record(ctx.out / "number_curve.csv");
    const GronwallFit gf = fit_gronwall(curve);
    ctx.manifest.value("gronwall", json{{"c", gf.c},
                                        {"N0", gf.N0},
                                        {"bound_holds", gf.bound_holds},
                                        {"early_rate", gf.early_rate},
                                        {"late_rate", gf.late_rate},
                                        {"super_exponential", gf.super_exponential}});
    ctx.log << "  Gronwall rate c = " << gf.c << (gf.super_exponential ? " (super-exponential growth!)" : "") << "\n";
    ctx.check("symplectic_defect", worst_symp, 1e-8);
    ctx.check("purity_defect", worst_purity, 1e-8);
    ctx.check("gronwall_bound", gf.bound_holds ? 0.0 : 1.0, 0.0);

    const double t_end = cfg.number_tau_final * alpha * alpha;
    const BogoliubovMap map = propagate_map(gen, t_end, alpha);
    const QuasiFreeState exact = evolve_quasifree(s0, map);
    const QuasiFreeState ode = evolve_odes(s0, gen, t_end, alpha, cfg.ode_dt * alpha * alpha);
    const double route = std::max((exact.gamma - ode.gamma).cwiseAbs().maxCoeff(),
                                  (exact.pairing - ode.pairing).cwiseAbs().maxCoeff());
    ctx.check("ode_vs_exponential", route, 1e-6);
    save_state(exact, ctx.out / "state");
    save_map(map, ctx.out / "state" / "bogmap.pfld");
}

void reduced_density_cmd(Context& ctx) {
    const ToyModel m = timed_model(ctx);
    std::vector<CompareResult> runs;
    for (double alpha : ctx.cfg.alphas) {
        StageTimer timer;
        CompareResult r = run_compare(m, ctx.cfg, alpha, ctx.cfg.n_max);
        ctx.manifest.timing("evolve_alpha_" + alpha_label(alpha), timer.seconds());
        std::vector<std::vector<double>> rows;
        double worst = -1.0;
        for (const auto& x : r.rows) {
            rows.push_back({x.t, x.tau, x.trace_distance, x.compressed_distance, x.active_weight, x.err_effective});
            worst = std::max(worst, x.trace_distance - 2 * x.err_effective);
        }
        const fs::path p = ctx.out / ("reduced_density_alpha_" + alpha_label(alpha) + ".csv");
        write_csv(p, units_t,
                  {"t", "tau", "trace_distance", "compressed_distance", "active_weight", "err_effective"}, rows);
        ctx.record(p);
        ctx.check("distance_below_twice_error_alpha_" + alpha_label(alpha), worst, 1e-12);
        ctx.log << "  alpha = " << alpha << ": distance at tau_final = " << r.rows.back().trace_distance << "\n";
        runs.push_back(std::move(r));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < runs.front().rows.size(); ++k) {
        for (std::size_t a = 1; a < runs.size(); ++a) {
            if (runs[a].alpha > runs[a - 1].alpha &&
                !(runs[a].rows[k].trace_distance < runs[a - 1].rows[k].trace_distance)) {
                decreasing = false;
            }
        }
    }
    ctx.manifest.value("distance_decreases_with_alpha", decreasing);
}

void selftest_cmd(Context& ctx) {
    const ToyModel m = timed_model(ctx);
    kernel_checks(ctx, m);

    // Resolvent identities on random vectors.
    std::mt19937_64 rng(ctx.cfg.seed);
    double worst_eq = 0, worst_orth = 0, worst_bound = 0;
    const Resolvent& R = *m.resolvent;
    for (int i = 0; i < 20; ++i) {
        const Field v = random_field(m.grid, rng, false);
        const Field Rv = R.apply(v);
        const Field Qv = R.project_q(v);
        Field lhs = R.apply_h(Rv);
        lhs.values -= R.lambda() * Rv.values;
        worst_eq = std::max(worst_eq, Field(m.grid, lhs.values - Qv.values).norm());
        worst_orth = std::max(worst_orth, std::abs(inner(R.phi0(), Rv)));
        worst_bound = std::max(worst_bound, Rv.norm() - Qv.norm() / R.gap());
    }
    ctx.check("resolvent_equation", worst_eq, 1e-8);
    ctx.check("resolvent_orthogonality", worst_orth, 1e-10);
    ctx.check("resolvent_norm_bound", worst_bound, 1e-12);

    // Normal-ordering identity between the two assembly routes.
    const FockSpace fock(m.modes.size(), 4);
    const SparseMat diff = build_quadratic_hamiltonian(m.kernels, fock) - build_quadratic_from_table(m.kernels, fock);
    double route = 0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(diff, k); it; ++it) route = std::max(route, std::abs(it.value()));
    }
    ctx.check("normal_ordering_routes", route, 1e-10);

    // Group law of the Bogoliubov map.
    const Generator gen = build_generator(m.kernels);
    const double alpha = ctx.cfg.alphas.front();
    const double t1 = 0.7 * alpha * alpha, t2 = 1.3 * alpha * alpha;
    const Eigen::MatrixXcd lhs = propagate_map(gen, t1 + t2, alpha).V;
    const Eigen::MatrixXcd rhs = propagate_map(gen, t1, alpha).V * propagate_map(gen, t2, alpha).V;
    ctx.check("bogoliubov_group_law", (lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
    ctx.check("symplectic_defect", propagate_map(gen, 10 * alpha * alpha, alpha).symplectic_defect, 1e-8);

    // Container round trip.
    const fs::path p = ctx.out / "selftest_phi0.pfld";
    pfld::save_field(m.sol.phi0, p, "phi0");
    const Field back = pfld::load_field(p, m.grid);
    ctx.check("pfld_round_trip", (back.values - m.sol.phi0.values).cwiseAbs().maxCoeff(), 0.0);
    fs::remove(p);
}

const std::map<std::string, std::function<void(Context&)>>& table() {
    static const std::map<std::string, std::function<void(Context&)>> t{
        {"solve-pekar", solve_pekar_cmd},   {"build-kernels", build_kernels_cmd},
        {"compare", compare_cmd},           {"scan-alpha", scan_alpha_cmd},
        {"bogoliubov-check", bogoliubov_cmd}, {"reduced-density", reduced_density_cmd},
        {"selftest", selftest_cmd}};
    return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"solve-pekar",     "build-kernels",    "compare", "scan-alpha",
                                                "bogoliubov-check", "reduced-density", "selftest"};
    return names;
}

std::string alpha_label(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", alpha);
    return buf;
}

int run_command(const std::string& verb, const RunConfig& cfg, std::ostream& log) {
    const auto it = table().find(verb);
    if (it == table().end()) {
        log << "error: unknown command '" << verb << "'\n";
        return exit_usage;
    }
    Manifest manifest(verb, cfg);
    const fs::path out(cfg.out_dir);
    int code = exit_ok;
    StageTimer total;
    try {
        validate(cfg);
        fs::create_directories(out);
        log << verb << " (preset " << cfg.preset << ") -> " << out.string() << "\n";
        Context ctx{cfg, log, manifest, out};
        it->second(ctx);
        if (!manifest.all_checks_passed()) code = exit_invariant;
    } catch (const ConvergenceError& e) {
        log << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        manifest.set_error(e.what());
        code = exit_nonconvergence;
    } catch (const InvariantError& e) {
        log << "error: " << e.what() << "\n";
        manifest.set_error(e.what());
        code = exit_invariant;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        manifest.set_error(e.what());
        code = exit_usage;
    }
    manifest.timing("total", total.seconds());
    manifest.set_exit_code(code);
    try {
        manifest.write(out / "manifest.json");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        if (code == exit_ok) code = exit_usage;
    }
    return code;
}

}  // namespace polaron
