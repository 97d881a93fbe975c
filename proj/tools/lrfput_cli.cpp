// Command-line runner: classify | solve | sweep | simulate | plot.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "lrfput/errors.hpp"
#include "lrfput/pipeline.hpp"
#include "lrfput/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solitary waves in long-range FPUT lattices"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<double> eps;
  std::optional<double> sigma;
  bool quiet = false;

  for (const char* name : {"classify", "solve", "sweep", "simulate", "plot"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--eps", eps, "long-wave parameter (overrides [solver] eps)");
    sub->add_option("--sigma", sigma, "correction exponent (overrides the certified value)");
    sub->add_flag("--quiet", quiet, "print failed checks and errors only");
  }
  app.get_subcommand("classify")->description("certify the Type I conditions and tabulate lambda(k)");
  app.get_subcommand("solve")->description("compute the solitary wave at one eps");
  app.get_subcommand("sweep")->description("fit the eps scaling of W_eps - W0 over [solver] eps_list");
  app.get_subcommand("simulate")->description("integrate the lattice from a computed wave");
  app.get_subcommand("plot")->description("render SVG figures from existing outputs");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  const lrfput::Console con{&std::cout, &std::cerr, quiet};
  lrfput::RunConfig cfg;
  try {
    cfg = lrfput::load_config(config_path);
    lrfput::apply_overrides(cfg, eps, sigma);
  } catch (const lrfput::Error& e) {
    con.error(e.what());
    return lrfput::kExitError;
  }
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  return lrfput::run_command(command, cfg, con);
}
