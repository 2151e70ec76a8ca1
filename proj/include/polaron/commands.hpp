// commands.hpp: CLI verbs as library calls
//
// Each verb writes its outputs and a manifest.json into cfg.out_dir and
// returns the process exit code: 0 success, 1 usage or I/O error,
// 2 invariant failure, 3 numerical non-convergence.
#pragma once

#include "polaron/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace polaron {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_invariant = 2, exit_nonconvergence = 3 };

const std::vector<std::string>& command_names();

int run_command(const std::string& verb, const RunConfig& cfg, std::ostream& log);

// "2" -> "2", "2.5" -> "2.5": used in per-alpha file names.
std::string alpha_label(double alpha);

}  // namespace polaron
