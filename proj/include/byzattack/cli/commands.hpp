#pragma once

// The five batch subcommands. Each returns its artifacts as strings so the
// caller decides where they go (file or standard output).
//
// Exit status: 0 success, 1 validation/property failure, 2 config error.
//
// CSV artifacts start with two '#' comment lines (tool/subcommand/schema/seed,
// then the resolved config as one-line JSON), followed by the header row:
//
//   optimize   k,nu0,nu1,alpha,gamma0,gamma1,f_star
//   evaluate   method,value,std_error
//   sweep      alpha,f_star
//   simulate   case,threshold_rule,threshold,p_fa,ci_halfwidth_fa,p_m,ci_halfwidth_m,warning
//
// JSON artifacts carry "schema_version": "1" and the resolved "config".

#include <string>
#include <vector>

#include "byzattack/cli/config.hpp"
#include "byzattack/inner_solver.hpp"

namespace byzattack::cli {

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfigError = 2 };

struct CommandOutput {
  int exit_code = kExitOk;
  /// Primary artifact (CSV or JSON per config.format).
  std::string artifact;
  /// optimize in CSV mode only: the JSON run summary.
  std::string summary;
  std::vector<std::string> warnings;
};

CommandOutput cmd_optimize(const RunConfig& cfg);
CommandOutput cmd_evaluate(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);
CommandOutput cmd_simulate(const RunConfig& cfg);
CommandOutput cmd_validate(const RunConfig& cfg, InnerSolverFn solver = default_inner_solver());

}  // namespace byzattack::cli
