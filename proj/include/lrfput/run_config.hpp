#pragma once

// INI run configuration shared by every CLI subcommand.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrfput/dispersion.hpp"
#include "lrfput/lattice_catalog.hpp"
#include "lrfput/simulator.hpp"
#include "lrfput/wave_solver.hpp"

namespace lrfput {

struct ModelSection {
  PotentialSpec spec;
  std::string family = "cm";
  double trunc_tol = 1e-10;
};

struct GridSection {
  double L = 40.0;
  int N = 2048;
};

struct SolverSection {
  std::optional<double> eps;
  std::vector<double> eps_list;
  std::optional<double> sigma_override;
  double eps_max = 0.5;
  std::string method = "contraction";  ///< contraction | petviashvili | both
  SolverOptions options;
  bool dealias = true;
  double residual_max = 1e-8;
  double agreement_max = 1e-6;  ///< H^1 distance between methods when both run
  double slope_rel_tol = 0.25;  ///< sweep slope tolerance relative to sigma
  unsigned threads = 0;
};

struct SimulateSection {
  SimulationOptions options;
  std::string solution;  ///< prior solution.json; empty means solve inline
  double speed_max = 0.01;
  double shape_max = 0.05;
  double drift_max = 1e-6;
};

struct OutputSection {
  std::string dir = "out";
  std::uint64_t seed = 0;
};

struct RunConfig {
  ModelSection model;
  GridSection grid;
  Type1Grid dispersion;
  SolverSection solver;
  SimulateSection simulate;
  OutputSection output;
  /// Sorted "section.key=value" listing, including command-line overrides.
  std::string canonical;
  /// FNV-1a of canonical, as 16 hex digits.
  std::string hash;
};

/// Parses INI text. SpecError on unknown sections or keys and malformed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Command-line --eps and --sigma; both enter the canonical listing and hash.
void apply_overrides(RunConfig& cfg, std::optional<double> eps, std::optional<double> sigma);

/// Checks every section against the preconditions of the modules that
/// `command` will call; throws SpecError before any computation.
void validate(const RunConfig& cfg, const std::string& command);

std::vector<double> parse_list(const std::string& text);

}  // namespace lrfput
