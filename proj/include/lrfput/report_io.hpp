#pragma once

// JSON documents, CSV tables and SVG line plots written by the CLI.
// Every file carries the config hash: a "config_hash" member in JSON and a
// leading "# config_hash=..." line in CSV and SVG.

#include <string>
#include <vector>

#include <json.hpp>

#include "lrfput/dispersion.hpp"
#include "lrfput/lattice_catalog.hpp"
#include "lrfput/simulator.hpp"
#include "lrfput/wave_solver.hpp"

namespace lrfput {

using Json = nlohmann::ordered_json;

Json to_json(const DispersionProfile& p);
Json to_json(const AssumptionReport& r);
Json to_json(const SweepReport& r);
/// Metadata only; the profile lives in a separate CSV.
Json to_json(const WaveSolution& s);
/// Report without the trajectory, which goes to CSV.
Json to_json(const VerificationReport& r);
Json model_summary(const LatticeModel& model);

void write_json(const std::string& path, Json doc, const std::string& hash);
Json read_json(const std::string& path);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;
};

/// Values use the shortest round-trip form, so reruns are byte-identical.
void write_csv(const std::string& path, const CsvTable& table, const std::string& hash);
/// Skips lines starting with '#'.
CsvTable read_csv(const std::string& path);

CsvTable lambda_table(const LatticeModel& model, double k_max, int n_points);
/// Columns x, W, V, W0.
CsvTable profile_table(const WaveSolution& s, const Field& W0);
CsvTable sweep_table(const SweepReport& r);
CsvTable trajectory_table(const VerificationReport& r);

/// Rebuilds a solution from solution.json and the profile CSV it names
/// (resolved relative to the JSON file).
WaveSolution read_solution(const std::string& json_path);

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Static SVG line plot; non-positive values are dropped on log axes.
void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotSpec& spec,
               const std::string& hash);

}  // namespace lrfput
