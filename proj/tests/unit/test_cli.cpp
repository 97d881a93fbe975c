#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrfput/errors.hpp"
#include "lrfput/pipeline.hpp"
#include "lrfput/report_io.hpp"
#include "lrfput/run_config.hpp"

namespace lrfput {
namespace {

namespace fs = std::filesystem;

const char* kNnn = R"(
; comment
[model]
family = nnn
g = 1
beta1 = 1

[solver]
eps = 0.1
method = both
eps_list = 0.4, 0.28, 0.2, 0.14, 0.1

[simulate]
J = 2048
T = 20
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lrfput_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig nnn_config(const fs::path& dir) {
  RunConfig cfg = parse_config(kNnn);
  cfg.output.dir = dir.string();
  return cfg;
}

struct QuietConsole {
  std::ostringstream out, err;
  Console con{&out, &err, true};
};

TEST(Config, ParsesSectionsAndDefaults) {
  const RunConfig cfg = parse_config(kNnn);
  EXPECT_EQ(cfg.model.family, "nnn");
  const auto* nnn = std::get_if<NnnSpec>(&cfg.model.spec.payload);
  ASSERT_NE(nnn, nullptr);
  EXPECT_EQ(nnn->g, 1.0);
  EXPECT_EQ(cfg.grid.L, 40.0);
  EXPECT_EQ(cfg.grid.N, 2048);
  ASSERT_TRUE(cfg.solver.eps.has_value());
  EXPECT_EQ(*cfg.solver.eps, 0.1);
  EXPECT_EQ(cfg.solver.eps_list, (std::vector<double>{0.4, 0.28, 0.2, 0.14, 0.1}));
  EXPECT_EQ(cfg.solver.method, "both");
  EXPECT_EQ(cfg.simulate.options.J, 2048);
  EXPECT_EQ(cfg.simulate.options.T, 20.0);
  EXPECT_EQ(cfg.hash.size(), 16u);
}

TEST(Config, RejectsUnknownAndMalformed) {
  EXPECT_THROW(parse_config("[model]\nfamily = nnn\ncolour = red\n"), SpecError);
  EXPECT_THROW(parse_config("[plotting]\nx = 1\n"), SpecError);
  EXPECT_THROW(parse_config("[grid]\nN = lots\n"), SpecError);
  EXPECT_THROW(parse_config("[grid]\nN = 100.5\n"), SpecError);
  EXPECT_THROW(parse_config("[model]\nfamily = nnn\na = 4\n"), SpecError);
  EXPECT_THROW(parse_config("[model]\nfamily = morse\n"), SpecError);
}

TEST(Config, HashIgnoresLayoutButTracksValues) {
  const RunConfig a = parse_config("[model]\nfamily = cm\na = 4\n[grid]\nN = 1024\nL = 40\n");
  const RunConfig b = parse_config("; same run\n[grid]\nL=40\n  N =   1024\n\n[model]\na=4\nfamily=cm\n");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.canonical, b.canonical);
  const RunConfig c = parse_config("[model]\nfamily = cm\na = 4.5\n[grid]\nN = 1024\nL = 40\n");
  EXPECT_NE(a.hash, c.hash);

  RunConfig d = a;
  apply_overrides(d, 0.2, std::nullopt);
  EXPECT_NE(d.hash, a.hash);
  EXPECT_NE(d.canonical.find("override.eps="), std::string::npos);
  ASSERT_TRUE(d.solver.eps.has_value());
  EXPECT_EQ(*d.solver.eps, 0.2);
  RunConfig e = a;
  apply_overrides(e, 0.2, std::nullopt);
  EXPECT_EQ(d.hash, e.hash);
}

TEST(Config, ValidateChecksPreconditions) {
  RunConfig cfg = parse_config(kNnn);
  EXPECT_NO_THROW(validate(cfg, "solve"));
  EXPECT_NO_THROW(validate(cfg, "sweep"));
  EXPECT_NO_THROW(validate(cfg, "simulate"));
  RunConfig big = cfg;
  apply_overrides(big, 0.9, std::nullopt);
  EXPECT_THROW(validate(big, "solve"), SpecError);
  RunConfig few = cfg;
  few.solver.eps_list = {0.2, 0.1};
  EXPECT_THROW(validate(few, "sweep"), SpecError);
  RunConfig small = cfg;
  small.simulate.options.J = 1000;
  EXPECT_THROW(validate(small, "simulate"), SpecError);
  RunConfig sig = cfg;
  apply_overrides(sig, std::nullopt, 2.5);
  EXPECT_THROW(validate(sig, "solve"), SpecError);
  EXPECT_THROW(validate(parse_config("[model]\nfamily = cm\na = 2.5\n"), "classify"), SpecError);
}

TEST(Config, ParseList) {
  EXPECT_EQ(parse_list("0.4, 0.2,0.1"), (std::vector<double>{0.4, 0.2, 0.1}));
  EXPECT_THROW(parse_list("0.4, x"), SpecError);
}

TEST(Csv, RoundTripIsExact) {
  const fs::path dir = scratch("csv");
  CsvTable t;
  t.columns = {"a", "b"};
  t.rows = {{0.1, 1.0 / 3.0}, {-2.5e-17, 6.02214076e23}};
  write_csv((dir / "t.csv").string(), t, "0123456789abcdef");
  const std::string text = slurp(dir / "t.csv");
  EXPECT_EQ(text.rfind("# config_hash=0123456789abcdef\na,b\n0.1,", 0), 0u);
  const CsvTable back = read_csv((dir / "t.csv").string());
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.column("b"), (std::vector<double>{1.0 / 3.0, 6.02214076e23}));
}

TEST(Pipeline, ClassifyWritesHashedArtifacts) {
  const fs::path dir = scratch("classify");
  const RunConfig cfg = nnn_config(dir);
  QuietConsole q;
  EXPECT_EQ(run_command("classify", cfg, q.con), kExitOk);
  for (const char* f : {"certificate.json", "lambda.csv", "lambda.svg"}) {
    ASSERT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_NE(slurp(dir / f).find(cfg.hash), std::string::npos) << f;
  }
  const Json cert = read_json((dir / "certificate.json").string());
  EXPECT_EQ(cert["config_hash"], cfg.hash);
  EXPECT_TRUE(cert["certificate"]["type1"].get<bool>());
  EXPECT_NEAR(cert["certificate"]["sigma_fit"].get<double>(), 2.0, 0.05);
}

TEST(Pipeline, RerunsAreByteIdentical) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  QuietConsole q;
  ASSERT_EQ(run_command("solve", nnn_config(a), q.con), kExitOk);
  ASSERT_EQ(run_command("solve", nnn_config(b), q.con), kExitOk);
  EXPECT_EQ(slurp(a / "profile.csv"), slurp(b / "profile.csv"));
  ASSERT_EQ(run_command("classify", nnn_config(a), q.con), kExitOk);
  ASSERT_EQ(run_command("classify", nnn_config(b), q.con), kExitOk);
  EXPECT_EQ(slurp(a / "lambda.csv"), slurp(b / "lambda.csv"));
}

TEST(Pipeline, TypeTwoLatticeFailsClassify) {
  const fs::path dir = scratch("type2");
  RunConfig cfg = parse_config("[model]\nfamily = nnn\ng = -0.2\nbeta1 = 1\n[solver]\neps = 0.1\n");
  cfg.output.dir = dir.string();
  QuietConsole q;
  EXPECT_EQ(run_command("classify", cfg, q.con), kExitCheckFailed);
  const Json cert = read_json((dir / "certificate.json").string());
  EXPECT_FALSE(cert["certificate"]["type1"].get<bool>());
  EXPECT_EQ(run_command("solve", cfg, q.con), kExitCheckFailed);
}

TEST(Pipeline, CalogeroMoserClassify) {
  const fs::path dir = scratch("cm35");
  RunConfig cfg = parse_config("[model]\nfamily = cm\na = 3.5\n");
  cfg.output.dir = dir.string();
  QuietConsole q;
  EXPECT_EQ(run_command("classify", cfg, q.con), kExitOk);
  const Json cert = read_json((dir / "certificate.json").string());
  EXPECT_NEAR(cert["certificate"]["sigma_fit"].get<double>(), 0.5, 0.05);
}

TEST(Pipeline, InvalidConfigExitsWithError) {
  RunConfig cfg = nnn_config(scratch("invalid"));
  apply_overrides(cfg, 0.9, std::nullopt);
  QuietConsole q;
  EXPECT_EQ(run_command("solve", cfg, q.con), kExitError);
  EXPECT_FALSE(q.err.str().empty());
}

TEST(Pipeline, SolveThenSimulateFromFile) {
  const fs::path dir = scratch("simulate");
  RunConfig cfg = nnn_config(dir);
  QuietConsole q;
  ASSERT_EQ(run_command("solve", cfg, q.con), kExitOk);
  const Json sol = read_json((dir / "solution.json").string());
  EXPECT_LE(sol["residual_H1"].get<double>(), 1e-8);

  const WaveSolution back = read_solution((dir / "solution.json").string());
  EXPECT_EQ(back.eps, 0.1);
  EXPECT_EQ(back.W.size(), 2048);

  cfg.simulate.solution = (dir / "solution.json").string();
  const fs::path sim_dir = scratch("simulate_run");
  cfg.output.dir = sim_dir.string();
  EXPECT_EQ(run_command("simulate", cfg, q.con), kExitOk) << q.err.str();
  EXPECT_FALSE(fs::exists(sim_dir / "solution.json"));
  const Json rep = read_json((sim_dir / "report.json").string());
  EXPECT_LT(rep["report"]["speed_error"].get<double>(), 0.01);
  const CsvTable traj = read_csv((sim_dir / "trajectory.csv").string());
  EXPECT_EQ(traj.columns, (std::vector<std::string>{"t", "peak_position", "peak_value", "energy"}));
  EXPECT_EQ(traj.rows.size(), 21u);
  EXPECT_NE(slurp(sim_dir / "trajectory.csv").find(cfg.hash), std::string::npos);

  ASSERT_EQ(run_command("plot", cfg, q.con), kExitOk);
  EXPECT_TRUE(fs::exists(sim_dir / "trajectory.svg"));
}

}  // namespace
}  // namespace lrfput
