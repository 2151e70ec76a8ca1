// experiments.hpp: the toy-model experiments behind the CLI verbs
//
// Times: t in strong-coupling units, tau = t / alpha^2.
#pragma once

#include "polaron/config.hpp"
#include "polaron/coupled.hpp"
#include "polaron/kernels.hpp"
#include "polaron/quasifree.hpp"
#include "polaron/resolvent.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace polaron {

// Discrete Pekar solution, resolvent and kernels for one config.
struct ToyModel {
    Grid3 grid;
    ModeSet modes;
    DiscretePekarSolution sol;
    std::shared_ptr<const Resolvent> resolvent;
    KernelPair kernels;
    KernelDiagnostics diagnostics;

    explicit ToyModel(const RunConfig& cfg);
};

// Phonon initial state on a truncated Fock space: vacuum, or the two-mode
// squeezed vacuum over parity pairs (normalized after truncation).
Eigen::VectorXcd initial_fock_state(const FockSpace& fs, const ModeSet& modes, const RunConfig& cfg);
QuasiFreeState initial_quasifree_state(const ModeSet& modes, const RunConfig& cfg);

struct CompareRow {
    double t = 0.0;
    double tau = 0.0;
    double err_effective = 0.0;   // || Psi(t) - phi0 x eta(t) ||
    double err_phase_only = 0.0;  // || Psi(t) - Psi(0) ||
    double N_full = 0.0;
    double N_eff = 0.0;
    double trace_distance = 0.0;
    double compressed_distance = 0.0;
    double active_weight = 0.0;
    double top_level = 0.0;
    double top_level_eff = 0.0;
    double norm_drift = 0.0;
    double energy = 0.0;
};

struct CompareResult {
    double alpha = 0.0;
    int n_max = 0;
    std::vector<CompareRow> rows;
    double max_norm_drift = 0.0;
    double max_energy_drift = 0.0;
    double max_top_level = 0.0;
    KrylovStats stats;
    Eigen::VectorXcd final_state;
};

// Bytes needed for a coupled run (state, Krylov basis, work vectors).
double coupled_memory_mb(const Grid3& g, const FockSpace& fs, int krylov_dim);

// Full vs effective dynamics. Throws InvariantError when the top-level
// population of the full state exceeds cfg.top_level_tol, and
// InvalidArgument when the memory estimate exceeds cfg.memory_limit_mb.
CompareResult run_compare(const ToyModel& model, const RunConfig& cfg, double alpha, int n_max);

struct ScalingFit {
    double tau_fit = 1.0;
    std::vector<double> alphas;
    std::vector<double> err_effective;
    std::vector<double> err_phase_only;
    double p = 0.0;           // err_effective ~ alpha^{-p}
    double p_residual = 0.0;  // rms of the log-log fit
    double p_phase = 0.0;
    double c = 0.0;           // envelope rate in tau
    double C = 0.0;           // envelope prefactor
    bool effective_beats_phase = false;
    bool envelope_holds = false;
};

// Needs at least three alphas. p: least squares of log err vs log alpha at
// the sample closest to tau_fit. c: least squares slope in tau of the
// running maximum of log(alpha err) on tau >= 0.1, one intercept per alpha.
// C: smallest prefactor with alpha err <= C e^{c tau} on every sample.
ScalingFit fit_scaling(const std::vector<CompareResult>& runs, double tau_fit);

struct BogoliubovRow {
    int n_max = 0;
    double t = 0.0;
    double tau = 0.0;
    double gamma_dev = 0.0;    // Frobenius norm of the difference
    double pairing_dev = 0.0;
    double N_fock = 0.0;
    double N_quasifree = 0.0;
    double top_level = 0.0;
};

struct BogoliubovReport {
    std::vector<BogoliubovRow> rows;
    std::vector<double> max_dev;  // per n_max, over tau
    bool monotone = true;
};

BogoliubovReport run_bogoliubov_check(const KernelPair& kp, const RunConfig& cfg, double alpha);

struct NumberRow {
    double t = 0.0;
    double tau = 0.0;
    double N = 0.0;
    double purity_defect = 0.0;
    double symplectic_defect = 0.0;
};

std::vector<NumberRow> number_curve(const Generator& gen, const QuasiFreeState& s0, double alpha,
                                    const std::vector<double>& taus);

struct GronwallFit {
    double c = 0.0;  // N(tau) <= (N0 + 1) e^{c tau} - 1
    double N0 = 0.0;
    bool bound_holds = false;
    double early_rate = 0.0;  // growth rate of log(N + 1) on the first half
    double late_rate = 0.0;   // and on the second half, relative to its start
    bool super_exponential = false;
};

GronwallFit fit_gronwall(const std::vector<NumberRow>& rows);

// CSV with a leading '#' units line, a header row and %.17g values.
void write_csv(const std::filesystem::path& path, const std::string& units, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Parses a file written by write_csv (comment line skipped, header checked
// for column count).
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, std::vector<std::string>* columns = nullptr);

}  // namespace polaron
