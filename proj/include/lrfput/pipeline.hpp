#pragma once

// Subcommands of the command-line runner. Each writes its artifacts under
// cfg.output.dir and returns the process exit code.

#include <iosfwd>
#include <string>

#include "lrfput/run_config.hpp"

namespace lrfput {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  ///< a threshold check failed or a solve diverged
inline constexpr int kExitError = 2;        ///< invalid configuration or input

struct Console {
  std::ostream* out;
  std::ostream* err;
  bool quiet = false;
  void info(const std::string& line) const;
  void error(const std::string& line) const;
  /// Prints "check <name>: pass|FAIL (<detail>)" and returns ok.
  bool check(const std::string& name, bool ok, const std::string& detail) const;
};

/// certificate.json, lambda.csv, lambda.svg.
int cmd_classify(const RunConfig& cfg, const Console& con);
/// certificate.json, solution.json, profile.csv.
int cmd_solve(const RunConfig& cfg, const Console& con);
/// certificate.json, sweep.json, sweep.csv, sweep.svg.
int cmd_sweep(const RunConfig& cfg, const Console& con);
/// report.json, trajectory.csv (and the solve artifacts when solving inline).
int cmd_simulate(const RunConfig& cfg, const Console& con);
/// SVGs for lambda and for whichever of profile.csv, sweep.csv and
/// trajectory.csv exist in the output directory.
int cmd_plot(const RunConfig& cfg, const Console& con);

/// Validates cfg for the command, dispatches, and maps exceptions to exit codes.
int run_command(const std::string& command, const RunConfig& cfg, const Console& con);

}  // namespace lrfput
