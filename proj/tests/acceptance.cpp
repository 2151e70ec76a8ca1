// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [OUTPUT_DIR]

#include "polaron/commands.hpp"
#include "polaron/errors.hpp"
#include "polaron/experiments.hpp"
#include "polaron/fock.hpp"
#include "polaron/manifest.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace polaron;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Report {
public:
    void run(int id, const std::string& name, const std::function<Outcome()>& body) {
        StageTimer timer;
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %d: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
                    o.detail.c_str(), timer.seconds());
        std::fflush(stdout);
        failed_ += o.pass ? 0 : 1;
    }
    int failed() const { return failed_; }

private:
    int failed_ = 0;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double sparse_max(const SparseMat& m) {
    double out = 0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
    return out;
}

// Largest relative difference between two directories' CSV values.
double compare_csv_dirs(const fs::path& a, const fs::path& b, int& files) {
    double worst = 0.0;
    files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        const auto x = read_csv(entry.path());
        const auto y = read_csv(b / entry.path().filename());
        if (x.size() != y.size()) return INFINITY;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x[i].size(); ++j) {
                worst = std::max(worst, std::abs(x[i][j] - y[i][j]) / std::max(1.0, std::abs(x[i][j])));
            }
        ++files;
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "polaron-acceptance";
    fs::create_directories(out);
    const RunConfig small = preset_config("desk-small");
    Report report;

    report.run(1, "Pekar solve on pekar-hi", [&] {
        const RunConfig cfg = preset_config("pekar-hi");
        const Grid3 g(cfg.grid_n, cfg.box_length);
        PekarOptions o;
        o.tol = cfg.pekar_tol;
        StageTimer timer;
        const PekarSolution s = minimize_pekar(g, gaussian(g, optimal_gaussian_width(), Vec3::Zero()), o);
        const double secs = timer.seconds();
        const double bound = -1.0 / (12 * std::numbers::pi);
        const double vd = std::abs(s.D - 4 * s.T) / s.D;
        const double vl = std::abs(s.lambda - 3 * s.energy) / std::abs(s.energy);
        const bool ok = s.energy <= bound && vd <= 1e-3 && vl <= 1e-3 && s.residual <= 1e-6 && secs <= 300;
        return Outcome{ok, "E = " + fmt("%.7f", s.energy) + ", |D-4T|/D = " + fmt("%.1e", vd) +
                               ", |lambda-3E|/|E| = " + fmt("%.1e", vl) + ", residual = " + fmt("%.1e", s.residual)};
    });

    const ToyModel model(small);

    report.run(2, "resolvent identities", [&] {
        const Resolvent& R = *model.resolvent;
        std::mt19937_64 rng(small.seed);
        double eq = 0, orth = 0, bound = 0;
        for (int i = 0; i < 20; ++i) {
            const Field v = random_field(model.grid, rng, false);
            const Field Rv = R.apply(v);
            const Field Qv = R.project_q(v);
            Field r = R.apply_h(Rv);
            r.values -= R.lambda() * Rv.values + Qv.values;
            eq = std::max(eq, r.norm());
            orth = std::max(orth, std::abs(inner(R.phi0(), Rv)));
            bound = std::max(bound, Rv.norm() * R.gap() / Qv.norm());
        }
        return Outcome{eq <= 1e-8 && orth <= 1e-10 && bound <= 1.0,
                       "max ||(h-lambda)Rv - Qv|| = " + fmt("%.1e", eq) + ", max |<phi0,Rv>| = " + fmt("%.1e", orth) +
                           ", max gap ||Rv|| / ||Qv|| = " + fmt("%.3f", bound)};
    });

    report.run(3, "kernel structure", [&] {
        const KernelDiagnostics& d = model.diagnostics;
        const bool ok = d.k_symmetry <= 1e-10 && d.g_hermiticity <= 1e-10 && d.k_imag <= 1e-8 && d.g_imag <= 1e-8 &&
                        model.kernels.epsilon == model.kernels.G.trace().real() / 2 && d.cross_route <= 1e-8;
        return Outcome{ok, "|K-K^T| = " + fmt("%.1e", d.k_symmetry) + ", |G-G^+| = " + fmt("%.1e", d.g_hermiticity) +
                               ", imag = " + fmt("%.1e", std::max(d.k_imag, d.g_imag)) +
                               ", cross route = " + fmt("%.1e", d.cross_route)};
    });

    report.run(4, "normal-ordering identity", [&] {
        const FockSpace fock(2, 4);
        const double diff = sparse_max(build_quadratic_hamiltonian(model.kernels, fock) -
                                       build_quadratic_from_table(model.kernels, fock));
        return Outcome{diff <= 1e-10, "max entry difference " + fmt("%.1e", diff) + " on M = 2, n_max = 4"};
    });

    report.run(5, "Bogoliubov map", [&] {
        const Generator gen = build_generator(model.kernels);
        const double alpha = small.alphas.front();
        const double a2 = alpha * alpha;
        double symp = 0;
        for (double tau : tau_schedule(10.0, 40)) symp = std::max(symp, propagate_map(gen, tau * a2, alpha).symplectic_defect);
        const Eigen::MatrixXcd lhs = propagate_map(gen, 7.5 * a2, alpha).V;
        const Eigen::MatrixXcd rhs = propagate_map(gen, 3.1 * a2, alpha).V * propagate_map(gen, 4.4 * a2, alpha).V;
        const double group = (lhs - rhs).cwiseAbs().maxCoeff();
        const QuasiFreeState s0 = vacuum_state(gen.M);
        const QuasiFreeState exact = evolve_quasifree(s0, propagate_map(gen, 5 * a2, alpha));
        const QuasiFreeState ode = evolve_odes(s0, gen, 5 * a2, alpha, small.ode_dt * a2);
        const double route = std::max((exact.gamma - ode.gamma).cwiseAbs().maxCoeff(),
                                      (exact.pairing - ode.pairing).cwiseAbs().maxCoeff());
        return Outcome{symp <= 1e-8 && group <= 1e-9 && route <= 1e-6,
                       "symplectic " + fmt("%.1e", symp) + ", group law " + fmt("%.1e", group) + ", ODE vs exp " +
                           fmt("%.1e", route)};
    });

    report.run(6, "quasi-free evolution vs truncated Fock oracle", [&] {
        RunConfig cfg = small;
        cfg.n_max_scan = {4, 6, 8};
        cfg.bog_tau_final = 2.0;
        StageTimer timer;
        const BogoliubovReport rep = run_bogoliubov_check(model.kernels, cfg, cfg.alphas.front());
        const double secs = timer.seconds();
        std::string detail = "max deviation";
        for (std::size_t i = 0; i < rep.max_dev.size(); ++i) {
            detail += " n_max=" + std::to_string(cfg.n_max_scan[i]) + ": " + fmt("%.1e", rep.max_dev[i]);
        }
        return Outcome{rep.monotone && rep.max_dev.back() <= 1e-4 && secs <= 60, detail};
    });

    std::vector<CompareResult> runs;
    report.run(7, "effective-dynamics scaling on desk-small", [&] {
        StageTimer timer;
        for (double alpha : {2.0, 4.0, 8.0}) runs.push_back(run_compare(model, small, alpha, small.n_max));
        const double secs = timer.seconds();
        const ScalingFit fit = fit_scaling(runs, 1.0);
        const bool ok = fit.p >= 0.8 && fit.effective_beats_phase && fit.envelope_holds && fit.c > 0 && secs <= 1800;
        std::string detail = "p = " + fmt("%.3f", fit.p) + " (phase only " + fmt("%.3f", fit.p_phase) + "), c = " +
                             fmt("%.3f", fit.c) + ", C = " + fmt("%.3f", fit.C) + ", err_eff/err_phase at tau=1:";
        for (std::size_t i = 0; i < fit.alphas.size(); ++i) {
            detail += " " + fmt("%.4f", fit.err_effective[i]) + "/" + fmt("%.4f", fit.err_phase_only[i]);
        }
        return Outcome{ok, detail};
    });

    report.run(8, "electron reduced density", [&] {
        if (runs.size() != 3) return Outcome{false, "needs the criterion 7 runs"};
        double excess = -1;
        bool decreasing = true;
        for (const auto& r : runs)
            for (const auto& row : r.rows) excess = std::max(excess, row.trace_distance - 2 * row.err_effective);
        for (std::size_t k = 0; k < runs[0].rows.size(); ++k) {
            if (runs[0].rows[k].tau < 0.1) continue;
            for (std::size_t a = 1; a < runs.size(); ++a) {
                decreasing = decreasing && runs[a].rows[k].trace_distance < runs[a - 1].rows[k].trace_distance;
            }
        }
        const auto& last = [&](std::size_t a) { return runs[a].rows.back().trace_distance; };
        return Outcome{excess <= 1e-12 && decreasing,
                       "max(distance - 2 err) = " + fmt("%.2e", excess) + ", distance at tau=1: " +
                           fmt("%.4f", last(0)) + " > " + fmt("%.4f", last(1)) + " > " + fmt("%.4f", last(2))};
    });

    report.run(9, "number growth bound", [&] {
        const Generator gen = build_generator(model.kernels);
        double worst_c = 0;
        bool ok = true;
        std::string detail;
        for (const char* init : {"vacuum", "squeezed"}) {
            RunConfig cfg = small;
            cfg.initial_state = init;
            const auto curve = number_curve(gen, initial_quasifree_state(model.modes, cfg), cfg.alphas.front(),
                                            tau_schedule(5.0, 200));
            const GronwallFit fit = fit_gronwall(curve);
            ok = ok && fit.bound_holds && std::isfinite(fit.c) && !fit.super_exponential;
            worst_c = std::max(worst_c, fit.c);
            detail += std::string(init) + ": c = " + fmt("%.4f", fit.c) + ", late/early rate " +
                      fmt("%.3g", fit.late_rate) + "/" + fmt("%.3g", fit.early_rate) + "; ";
        }
        return Outcome{ok, detail.substr(0, detail.size() - 2)};
    });

    report.run(10, "determinism", [&] {
        std::ostringstream log;
        double worst = 0;
        int total_files = 0;
        for (const char* verb : {"compare", "bogoliubov-check", "solve-pekar"}) {
            RunConfig cfg = std::string(verb) == "solve-pekar" ? preset_config("pekar-hi") : small;
            fs::path dirs[2];
            for (int k = 0; k < 2; ++k) {
                dirs[k] = out / (std::string(verb) + "-" + std::to_string(k));
                cfg.out_dir = dirs[k].string();
                if (run_command(verb, cfg, log) != exit_ok) {
                    return Outcome{false, std::string(verb) + " failed: " + log.str()};
                }
            }
            int files = 0;
            worst = std::max(worst, compare_csv_dirs(dirs[0], dirs[1], files));
            total_files += files;
            if (std::string(verb) == "solve-pekar") {
                const auto a = file_hash(dirs[0] / "pekar" / "scalars.json");
                const auto b = file_hash(dirs[1] / "pekar" / "scalars.json");
                if (a != b) return Outcome{false, "scalars.json differs between reruns"};
            }
        }
        return Outcome{worst <= 1e-12, std::to_string(total_files) + " CSV files, max relative difference " +
                                           fmt("%.1e", worst)};
    });

    std::printf("%d criteria failed\n", report.failed());
    return report.failed() == 0 ? 0 : 1;
}
