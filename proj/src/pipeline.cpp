#include "lrfput/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "lrfput/dispersion.hpp"
#include "lrfput/errors.hpp"
#include "lrfput/operators.hpp"
#include "lrfput/report_io.hpp"
#include "lrfput/simulator.hpp"
#include "lrfput/wave_solver.hpp"

namespace lrfput {

namespace fs = std::filesystem;

namespace {

constexpr double kParityMax = 1e-10;
constexpr int kLambdaPoints = 1025;

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << std::scientific << v;
  return os.str();
}

// Timestamps live only in JSON metadata; CSV output stays reproducible.
std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output.dir) / name).string();
}

Json metadata(const RunConfig& cfg, const std::string& command) {
  return {{"command", command}, {"created", utc_now()}, {"seed", cfg.output.seed}};
}

struct Prepared {
  std::shared_ptr<const LatticeModel> model;
  DispersionProfile profile;
  AssumptionReport assumptions;
  double sigma = 0.0;
};

Prepared prepare(const RunConfig& cfg, const Console& con, const std::string& command) {
  Prepared p;
  p.model = std::make_shared<const LatticeModel>(build_model(cfg.model.spec, cfg.model.trunc_tol));
  p.profile = certify_type1(*p.model, cfg.dispersion);
  p.assumptions = check_assumptions(*p.model);
  p.sigma = cfg.solver.sigma_override.value_or(p.profile.sigma);

  Json doc;
  doc["meta"] = metadata(cfg, command);
  doc["model"] = model_summary(*p.model);
  doc["certificate"] = to_json(p.profile);
  doc["assumptions"] = to_json(p.assumptions);
  doc["sigma_used"] = p.sigma;
  write_json(out_path(cfg, "certificate.json"), doc, cfg.hash);

  std::ostringstream os;
  os << "model " << cfg.model.family << ": M = " << p.model->range()
     << ", c0^2 = " << std::setprecision(12) << p.profile.c0_sq
     << ", lambda''(0) = " << p.profile.lambda_dd0 << ", sigma = " << p.sigma
     << ", type I = " << (p.profile.type1_certified ? "yes" : "no");
  con.info(os.str());
  return p;
}

OperatorContext make_context(const RunConfig& cfg, const Prepared& p, double eps) {
  return OperatorContext(p.model, p.profile, Grid(cfg.grid.L, cfg.grid.N), eps, p.sigma,
                         cfg.solver.dealias);
}

void write_failure(const RunConfig& cfg, const std::string& command, const SolverError& e) {
  Json doc;
  doc["meta"] = metadata(cfg, command);
  doc["error"] = e.what();
  doc["last_value"] = std::isfinite(e.last_value()) ? Json(e.last_value()) : Json(nullptr);
  write_json(out_path(cfg, command + "_failure.json"), doc, cfg.hash);
}

void plot_lambda(const RunConfig& cfg, const LatticeModel& model, bool write_table) {
  const CsvTable t = lambda_table(model, cfg.dispersion.k_max, kLambdaPoints);
  if (write_table) write_csv(out_path(cfg, "lambda.csv"), t, cfg.hash);
  write_svg(out_path(cfg, "lambda.svg"), {{t.column("k"), t.column("lambda"), "lambda(k)"}},
            {"Phase speed squared, " + cfg.model.family + " lattice", "k", "lambda(k)", false, false},
            cfg.hash);
}

// Solves at eps and writes solution.json and profile.csv. Returns false when a check fails.
bool solve_and_write(const RunConfig& cfg, const Prepared& p, const Console& con,
                     WaveSolution& out) {
  const double eps = *cfg.solver.eps;
  const OperatorContext ctx = make_context(cfg, p, eps);
  const std::string& method = cfg.solver.method;
  const SolverOptions& opts = cfg.solver.options;

  bool ok = true;
  Json checks = Json::object();
  Json oracle;
  if (method == "petviashvili") {
    out = solve_petviashvili(ctx, opts);
  } else {
    out = solve_contraction(ctx, opts);
    if (method == "both") {
      const WaveSolution pv = solve_petviashvili(ctx, opts);
      const double agree = sobolev_norm(pv.W - out.W, 1.0);
      oracle = to_json(pv);
      oracle["agreement_H1"] = agree;
      ok &= con.check("method agreement", agree <= cfg.solver.agreement_max,
                      "H1 distance " + sci(agree) + " <= " + sci(cfg.solver.agreement_max));
      checks["agreement"] = agree <= cfg.solver.agreement_max;
    }
  }
  const bool res_ok = out.residual_H1 <= cfg.solver.residual_max;
  ok &= con.check("residual", res_ok,
                  "H1 residual " + sci(out.residual_H1) + " <= " + sci(cfg.solver.residual_max));
  checks["residual"] = res_ok;
  const double parity = std::max(out.W.parity_defect(), out.V.parity_defect());
  ok &= con.check("parity", parity <= kParityMax, "defect " + sci(parity));
  checks["parity"] = parity <= kParityMax;
  if (!out.monotone) con.info("note: contraction increments were not monotone");
  if (p.model->cm_exponent() && !out.nonpositive) con.info("note: W has positive grid values");

  Json doc;
  doc["meta"] = metadata(cfg, "solve");
  doc["model"] = model_summary(*p.model);
  doc["solution"] = to_json(out);
  doc["eps"] = out.eps;
  doc["sigma"] = out.sigma;
  doc["c_eps_sq"] = out.c_eps_sq;
  doc["method"] = to_string(out.method);
  doc["residual_H1"] = out.residual_H1;
  doc["iterations"] = out.iterations;
  doc["grid"] = {{"L", cfg.grid.L}, {"N", cfg.grid.N}};
  doc["W0_amplitude"] = ctx.W0_amplitude();
  doc["op_range"] = ctx.op_range();
  if (!oracle.is_null()) doc["oracle"] = oracle;
  doc["checks"] = checks;
  doc["profile"] = "profile.csv";
  write_json(out_path(cfg, "solution.json"), doc, cfg.hash);
  write_csv(out_path(cfg, "profile.csv"), profile_table(out, ctx.W0()), cfg.hash);

  std::ostringstream os;
  os << "solved eps = " << eps << " by " << to_string(out.method) << " in " << out.iterations
     << " iterations, c_eps^2 = " << std::setprecision(12) << out.c_eps_sq;
  con.info(os.str());
  return ok;
}

}  // namespace

void Console::info(const std::string& line) const {
  if (!quiet && out) *out << line << "\n";
}

void Console::error(const std::string& line) const {
  if (err) *err << "error: " << line << "\n";
}

bool Console::check(const std::string& name, bool ok, const std::string& detail) const {
  if (out && (!quiet || !ok)) {
    *out << "check " << name << ": " << (ok ? "pass" : "FAIL") << " (" << detail << ")\n";
  }
  return ok;
}

int cmd_classify(const RunConfig& cfg, const Console& con) {
  const Prepared p = prepare(cfg, con, "classify");
  plot_lambda(cfg, *p.model, true);
  bool ok = con.check("type I", p.profile.type1_certified,
                      "sup outside k* " + sci(p.profile.sup_outside) + ", c0^2 " +
                          sci(p.profile.c0_sq) + ", lambda''(0) " + sci(p.profile.lambda_dd0));
  ok &= con.check("assumptions", p.assumptions.pass,
                  "b = " + sci(p.assumptions.b) + ", tail bound " + sci(p.assumptions.b_tail_bound));
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_solve(const RunConfig& cfg, const Console& con) {
  const Prepared p = prepare(cfg, con, "solve");
  if (!p.profile.type1_certified) {
    con.error("lattice is not certified Type I; see certificate.json");
    return kExitCheckFailed;
  }
  WaveSolution sol(Grid(cfg.grid.L, cfg.grid.N));
  try {
    return solve_and_write(cfg, p, con, sol) ? kExitOk : kExitCheckFailed;
  } catch (const SolverError& e) {
    write_failure(cfg, "solve", e);
    con.error(e.what());
    return kExitCheckFailed;
  }
}

int cmd_sweep(const RunConfig& cfg, const Console& con) {
  const Prepared p = prepare(cfg, con, "sweep");
  if (!p.profile.type1_certified) {
    con.error("lattice is not certified Type I; see certificate.json");
    return kExitCheckFailed;
  }
  const SweepReport rep =
      correction_scaling_sweep(p.model, p.profile, Grid(cfg.grid.L, cfg.grid.N), p.sigma,
                               cfg.solver.eps_list, cfg.solver.options, cfg.solver.eps_max,
                               cfg.solver.threads);
  const CsvTable table = sweep_table(rep);
  write_csv(out_path(cfg, "sweep.csv"), table, cfg.hash);

  std::vector<double> fit;
  for (double e : table.column("eps")) fit.push_back(std::exp(rep.intercept) * std::pow(e, rep.slope));
  write_svg(out_path(cfg, "sweep.svg"),
            {{table.column("eps"), table.column("diff_H1"), "||W_eps - W0||_H1"},
             {table.column("eps"), fit, "fit, slope " + sci(rep.slope)}},
            {"Correction scaling", "eps", "H1 distance", true, true}, cfg.hash);

  const double tol = cfg.solver.slope_rel_tol * p.sigma;
  const bool all_ok = rep.n_ok == static_cast<int>(rep.rows.size());
  const bool slope_ok = rep.fit_ok && std::abs(rep.slope - p.sigma) <= tol;
  Json doc;
  doc["meta"] = metadata(cfg, "sweep");
  doc["sweep"] = to_json(rep);
  doc["expected_slope"] = p.sigma;
  doc["slope_tolerance"] = tol;
  doc["checks"] = {{"all_converged", all_ok}, {"slope", slope_ok}};
  write_json(out_path(cfg, "sweep.json"), doc, cfg.hash);

  for (const auto& r : rep.rows) {
    std::ostringstream os;
    os << "eps = " << r.eps << ": ";
    if (r.ok) {
      os << "||W - W0||_H1 = " << sci(r.diff_H1) << ", residual " << sci(r.residual);
    } else {
      os << "failed (" << r.error << ")";
    }
    con.info(os.str());
  }
  bool ok = con.check("all solves converged", all_ok,
                      std::to_string(rep.n_ok) + " of " + std::to_string(rep.rows.size()));
  ok &= con.check("slope", slope_ok,
                  "fitted " + sci(rep.slope) + ", expected " + sci(p.sigma) + " +- " + sci(tol));
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const RunConfig& cfg, const Console& con) {
  const Prepared p = prepare(cfg, con, "simulate");
  bool ok = true;
  WaveSolution sol(Grid(cfg.grid.L, cfg.grid.N));
  if (!cfg.simulate.solution.empty()) {
    sol = read_solution(cfg.simulate.solution);
    con.info("loaded solution from " + cfg.simulate.solution);
  } else {
    if (!p.profile.type1_certified) {
      con.error("lattice is not certified Type I; see certificate.json");
      return kExitCheckFailed;
    }
    try {
      ok &= solve_and_write(cfg, p, con, sol);
    } catch (const SolverError& e) {
      write_failure(cfg, "solve", e);
      con.error(e.what());
      return kExitCheckFailed;
    }
  }

  const VerificationReport rep = run_and_verify(sol, p.model, cfg.simulate.options);
  write_csv(out_path(cfg, "trajectory.csv"), trajectory_table(rep), cfg.hash);
  const SimulateSection& s = cfg.simulate;
  Json doc;
  doc["meta"] = metadata(cfg, "simulate");
  doc["report"] = to_json(rep);
  doc["J"] = s.options.J;
  doc["T"] = s.options.T;
  doc["checks"] = {{"speed", rep.speed_error <= s.speed_max},
                   {"shape", rep.shape_error <= s.shape_max},
                   {"energy", rep.energy_drift <= s.drift_max},
                   {"completed", !rep.early_stop}};
  write_json(out_path(cfg, "report.json"), doc, cfg.hash);

  std::ostringstream os;
  os << "integrated " << rep.steps << " steps of dt = " << rep.dt << " with M_f = " << rep.force_range
     << ": speed " << std::setprecision(10) << rep.measured_speed << " vs " << rep.predicted_speed;
  con.info(os.str());
  ok &= con.check("speed", rep.speed_error <= s.speed_max,
                  "relative error " + sci(rep.speed_error) + " <= " + sci(s.speed_max));
  ok &= con.check("shape", rep.shape_error <= s.shape_max,
                  "relative l2 " + sci(rep.shape_error) + " <= " + sci(s.shape_max));
  ok &= con.check("energy", rep.energy_drift <= s.drift_max,
                  "relative drift " + sci(rep.energy_drift) + " <= " + sci(s.drift_max));
  ok &= con.check("completed", !rep.early_stop, "t = " + sci(rep.t_final));
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_plot(const RunConfig& cfg, const Console& con) {
  const auto model =
      std::make_shared<const LatticeModel>(build_model(cfg.model.spec, cfg.model.trunc_tol));
  plot_lambda(cfg, *model, false);
  con.info("wrote " + out_path(cfg, "lambda.svg"));
  const std::string profile = out_path(cfg, "profile.csv");
  if (fs::exists(profile)) {
    const CsvTable t = read_csv(profile);
    write_svg(out_path(cfg, "profile.svg"),
              {{t.column("x"), t.column("W"), "W_eps"}, {t.column("x"), t.column("W0"), "W0"}},
              {"Solitary-wave profile", "x", "W", false, false}, cfg.hash);
    con.info("wrote " + out_path(cfg, "profile.svg"));
  }
  const std::string sweep = out_path(cfg, "sweep.csv");
  if (fs::exists(sweep)) {
    const CsvTable t = read_csv(sweep);
    write_svg(out_path(cfg, "sweep.svg"), {{t.column("eps"), t.column("diff_H1"), "||W_eps - W0||_H1"}},
              {"Correction scaling", "eps", "H1 distance", true, true}, cfg.hash);
    con.info("wrote " + out_path(cfg, "sweep.svg"));
  }
  const std::string traj = out_path(cfg, "trajectory.csv");
  if (fs::exists(traj)) {
    const CsvTable t = read_csv(traj);
    write_svg(out_path(cfg, "trajectory.svg"),
              {{t.column("t"), t.column("peak_position"), "strain peak"}},
              {"Wave position", "t", "site", false, false}, cfg.hash);
    con.info("wrote " + out_path(cfg, "trajectory.svg"));
  }
  return kExitOk;
}

int run_command(const std::string& command, const RunConfig& cfg, const Console& con) {
  try {
    validate(cfg, command == "plot" ? "classify" : command);
    if (command == "classify") return cmd_classify(cfg, con);
    if (command == "solve") return cmd_solve(cfg, con);
    if (command == "sweep") return cmd_sweep(cfg, con);
    if (command == "simulate") return cmd_simulate(cfg, con);
    if (command == "plot") return cmd_plot(cfg, con);
    con.error("unknown command " + command);
    return kExitError;
  } catch (const SolverError& e) {
    con.error(e.what());
    return kExitCheckFailed;
  } catch (const CertificationError& e) {
    con.error(e.what());
    return kExitCheckFailed;
  } catch (const Error& e) {
    con.error(e.what());
    return kExitError;
  } catch (const std::exception& e) {
    con.error(e.what());
    return kExitError;
  }
}

}  // namespace lrfput
