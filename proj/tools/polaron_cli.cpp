// polaron: command-line front end for the toy-model experiments
//
//   polaron <verb> [--preset NAME] [--config PATH] [--set KEY=VALUE]...
//                  [--out DIR] [--alpha X]... [--seed N]
//
// Settings are applied in order: preset, config file, --set, then the
// dedicated flags. POLARON_THREADS is recorded in the manifest; the solvers
// run on one thread.

#include "polaron/commands.hpp"
#include "polaron/config.hpp"
#include "polaron/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

int main(int argc, char** argv) {
    using namespace polaron;
    CLI::App app{"Strong-coupling Froehlich polaron toy-model lab"};
    app.require_subcommand(1);

    std::string preset;
    std::string config_path;
    std::vector<std::string> settings;
    std::string out_dir;
    std::vector<double> alphas;
    std::optional<std::uint64_t> seed;

    const std::map<std::string, std::string> help{
        {"solve-pekar", "minimize the Pekar functional on the grid (default preset pekar-hi)"},
        {"build-kernels", "discrete Pekar solution, spectral gap and kernels K, G"},
        {"compare", "full vs effective dynamics per alpha"},
        {"scan-alpha", "compare for every alpha plus the scaling fit"},
        {"bogoliubov-check", "quasi-free evolution vs the truncated Fock oracle, N(t) curve"},
        {"reduced-density", "electron reduced density distance to phi0 per alpha"},
        {"selftest", "fast invariant checks"}};
    for (const auto& verb : command_names()) {
        CLI::App* sub = app.add_subcommand(verb, help.at(verb));
        sub->add_option("--preset", preset, "desk-small, desk-standard or pekar-hi");
        sub->add_option("--config", config_path, "key = value file")->check(CLI::ExistingFile);
        sub->add_option("--set", settings, "KEY=VALUE override (repeatable)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--alpha", alphas, "coupling value (repeatable)");
        sub->add_option("--seed", seed, "random seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_usage;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        if (preset.empty()) preset = verb == "solve-pekar" ? "pekar-hi" : "desk-small";
        cfg = preset_config(preset);
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        for (const auto& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidArgument("--set expects KEY=VALUE, got '" + kv + "'");
            apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!alphas.empty()) cfg.alphas = alphas;
        if (seed) cfg.seed = *seed;
        validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return run_command(verb, cfg, std::cout);
}
