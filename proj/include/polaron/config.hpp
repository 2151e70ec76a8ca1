// config.hpp: run configuration: presets, flat key=value files, overrides
//
// File format: one `key = value` per line, `#` starts a comment, blank lines
// ignored. List values are comma separated. Unknown keys are errors; a key
// given twice keeps the later value.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace polaron {

struct RunConfig {
    std::string preset = "desk-small";

    int grid_n = 8;
    double box_length = 12.566370614359172;  // 4 pi
    std::string coulomb = "isolated";        // continuum solve only: isolated | jellium

    int modes = 2;
    double weight = 30.0;
    int n_max = 10;

    std::vector<double> alphas{2.0, 4.0, 8.0};
    double tau_final = 1.0;
    int tau_steps = 20;
    std::string initial_state = "vacuum";  // vacuum | squeezed
    double squeeze = 0.1;

    // bogoliubov-check
    std::vector<int> n_max_scan{4, 6, 8};
    double bog_tau_final = 2.0;
    int bog_tau_steps = 8;
    double number_tau_final = 5.0;
    int number_tau_steps = 100;

    double pekar_tol = 1e-8;
    int pekar_max_iter = 20000;
    double precond_shift = 0.1;
    double sc_tol = 1e-12;
    double damping = 0.0;
    double cg_tol = 1e-10;
    int krylov_dim = 30;
    double krylov_tol = 1e-10;
    double ode_dt = 0.005;          // in units of tau
    double top_level_tol = 1e-3;    // compare aborts above this
    double memory_limit_mb = 1500;  // refuse coupled runs above this estimate

    std::string out_dir = "polaron-out";
    std::uint64_t seed = 1;
};

// Presets: desk-small, desk-standard, pekar-hi.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Throws InvalidArgument for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads a file on top of `base`. A `preset` key, if present, must come first
// and resets the base to that preset.
RunConfig load_config(const std::filesystem::path& path, RunConfig base);

// Every field as (key, canonical value), in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

void validate(const RunConfig& cfg);

std::vector<double> tau_schedule(double tau_final, int steps);

}  // namespace polaron
