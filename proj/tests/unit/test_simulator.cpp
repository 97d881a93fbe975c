#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "lrfput/errors.hpp"
#include "lrfput/simulator.hpp"
#include "lrfput/wave_solver.hpp"
#include "support/test_support.hpp"

namespace lrfput {
namespace {

using testing::cm_model;
using testing::nnn_model;
using Big = boost::multiprecision::cpp_bin_float_50;

const Grid kGrid(40.0, 1024);

const std::shared_ptr<const LatticeModel>& nnn1() {
  static const auto m = nnn_model(1.0);
  return m;
}

const WaveSolution& solution(const std::shared_ptr<const LatticeModel>& m, double eps) {
  static std::map<std::pair<const LatticeModel*, double>, WaveSolution> cache;
  auto key = std::make_pair(m.get(), eps);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const DispersionProfile p = certify_type1(*m);
    const OperatorContext ctx(m, p, kGrid, eps, p.sigma);
    it = cache.emplace(key, solve_contraction(ctx)).first;
  }
  return it->second;
}

LatticeState random_state(int J, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, amp);
  LatticeState s = LatticeState::flat(J);
  for (double& d : s.d) d = nd(rng);
  for (double& v : s.v) v = nd(rng);
  return s;
}

// Smooth low-mode displacement and zero velocity.
LatticeState smooth_state(int J, double amp) {
  LatticeState s = LatticeState::flat(J);
  for (int j = 0; j < J; ++j) {
    const double x = 2.0 * testing::kPi * j / J;
    s.d[j] = amp * (std::sin(x) + 0.5 * std::cos(3.0 * x));
  }
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(Force, EquilibriumAndTranslation) {
  for (const auto& [m, Mf] : std::vector<std::pair<std::shared_ptr<const LatticeModel>, int>>{
           {cm_model(4.0), 30}, {nnn1(), 2}}) {
    const LatticeSimulator sim(m, Mf);
    LatticeState s = LatticeState::flat(256);
    for (double f : sim.force(s)) EXPECT_EQ(f, 0.0);
    std::fill(s.d.begin(), s.d.end(), 0.37);
    for (double f : sim.force(s)) EXPECT_NEAR(f, 0.0, 1e-15);
  }
}

TEST(Force, SingleSiteMatchesExtendedPrecision) {
  const double a = 4.0;
  const int J = 256, Mf = 30, k = 100;
  const LatticeSimulator sim(cm_model(a), Mf);
  LatticeState s = LatticeState::flat(J);
  s.d[k] = 0.05;
  const std::vector<double> F = sim.force(s);
  // Phi'_m(r) = -a r^(-a-1); the constant parts cancel pairwise.
  const auto dphi = [&](int m, const Big& eta) { return -Big(a) * pow(Big(m) + eta, -Big(a) - 1); };
  for (int j = 0; j < J; ++j) {
    Big f = 0;
    for (int m = 1; m <= Mf; ++m) {
      const Big fwd = Big(s.d[(j + m) % J]) - Big(s.d[j]);
      const Big bwd = Big(s.d[j]) - Big(s.d[(j - m + J) % J]);
      f += dphi(m, fwd) - dphi(m, bwd);
    }
    EXPECT_NEAR(F[j], static_cast<double>(f), 1e-12) << "j = " << j;
  }
}

TEST(Force, IsMinusEnergyGradient) {
  for (const auto& [m, Mf] : std::vector<std::pair<std::shared_ptr<const LatticeModel>, int>>{
           {cm_model(4.0), 30}, {nnn1(), 2}}) {
    const LatticeSimulator sim(m, Mf);
    LatticeState s = random_state(256, 0.01, 3);
    const std::vector<double> F = sim.force(s);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> pick(0, 255);
    for (int i = 0; i < 20; ++i) {
      const int j = pick(rng);
      const double h = 1e-6, d0 = s.d[j];
      s.d[j] = d0 + h;
      const double ep = sim.total_energy(s);
      s.d[j] = d0 - h;
      const double em = sim.total_energy(s);
      s.d[j] = d0;
      const double g = -(ep - em) / (2.0 * h);
      EXPECT_NEAR(F[j], g, 1e-6 * std::max(std::abs(F[j]), 1e-3)) << "j = " << j;
    }
  }
}

TEST(Force, DomainViolationNamesSite) {
  const LatticeSimulator sim(cm_model(4.0), 30);
  LatticeState s = LatticeState::flat(256);
  s.d[7] = 0.8;
  try {
    sim.force(s);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("site"), std::string::npos) << what;
    EXPECT_NE(what.find("m = "), std::string::npos) << what;
  }
}

TEST(Simulator, ConstructionChecks) {
  EXPECT_THROW(LatticeSimulator(nnn1(), 0), SpecError);
  EXPECT_THROW(LatticeSimulator(nnn1(), 3), SpecError);
  const LatticeSimulator sim(cm_model(4.0), 30);
  EXPECT_THROW(sim.force(LatticeState::flat(60)), SpecError);
  EXPECT_EQ(default_force_range(*cm_model(4.0), 4096), 68);
  EXPECT_EQ(default_force_range(*nnn1(), 4096), 2);
  EXPECT_EQ(default_force_range(*cm_model(4.0), 64), 31);
}

TEST(Verlet, FlatLatticeIsFixedPoint) {
  const LatticeSimulator sim(cm_model(4.0), 30);
  LatticeState s = LatticeState::flat(256);
  for (int i = 0; i < 10; ++i) sim.step_verlet(s, 0.01);
  for (int j = 0; j < 256; ++j) {
    EXPECT_EQ(s.d[j], 0.0);
    EXPECT_EQ(s.v[j], 0.0);
  }
  EXPECT_NEAR(s.t, 0.1, 1e-15);
}

TEST(Verlet, FrozenForcesGiveLinearMotion) {
  const LatticeSimulator sim(nnn1(), 2);
  LatticeState s = LatticeState::flat(128);
  std::fill(s.v.begin(), s.v.end(), 0.3);
  for (int i = 0; i < 100; ++i) sim.step_verlet(s, 0.05);
  for (int j = 0; j < 128; ++j) {
    EXPECT_NEAR(s.d[j], 1.5, 1e-13);
    EXPECT_EQ(s.v[j], 0.3);
  }
}

TEST(Verlet, Reversible) {
  const LatticeSimulator sim(cm_model(4.0), 30);
  const LatticeState s0 = random_state(256, 0.005, 5);
  LatticeState s = s0;
  for (int i = 0; i < 50; ++i) sim.step_verlet(s, 0.01);
  for (int i = 0; i < 50; ++i) sim.step_verlet(s, -0.01);
  EXPECT_LT(max_abs_diff(s.d, s0.d), 1e-11);
  EXPECT_LT(max_abs_diff(s.v, s0.v), 1e-11);
}

// One step of size dt against two of dt/2: the local error is O(dt^3).
TEST(Verlet, LocalErrorIsThirdOrder) {
  const LatticeSimulator sim(nnn1(), 2);
  std::vector<double> dts = {0.2, 0.1, 0.05, 0.025}, err;
  for (double dt : dts) {
    LatticeState a = smooth_state(64, 0.05), b = a;
    sim.step_verlet(a, dt);
    sim.step_verlet(b, 0.5 * dt);
    sim.step_verlet(b, 0.5 * dt);
    err.push_back(max_abs_diff(a.d, b.d) + max_abs_diff(a.v, b.v));
  }
  EXPECT_NEAR(testing::loglog_slope(dts, err), 3.0, 0.3);
}

TEST(Energy, GaugeAndKinetic) {
  const LatticeSimulator sim(cm_model(4.0), 30);
  LatticeState s = LatticeState::flat(256);
  EXPECT_EQ(sim.total_energy(s), 0.0);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  double ke = 0.0;
  for (double& v : s.v) {
    v = nd(rng);
    ke += 0.5 * v * v;
  }
  EXPECT_NEAR(sim.total_energy(s), ke, 1e-12 * ke);
}

TEST(Energy, WaveDriftOverTenThousandSteps) {
  const auto m = cm_model(4.0);
  const WaveSolution& sol = solution(m, 0.1);
  const int J = 2048;
  const LatticeSimulator sim(m, default_force_range(*m, J));
  LatticeState s = init_from_wave(sol, *m, J, 0.25 * J);
  const double dt = 0.05 / std::sqrt(c0_sq(*m));
  const double E0 = sim.total_energy(s);
  double drift = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    sim.step_verlet(s, dt);
    if (i % 500 == 0) drift = std::max(drift, std::abs(sim.total_energy(s) - E0) / std::abs(E0));
  }
  EXPECT_LT(drift, 1e-6);
}

TEST(InitFromWave, StrainIsScaledProfile) {
  const auto m = nnn1();
  double prev_ratio = 0.0;
  for (double eps : {0.1, 0.05}) {
    const WaveSolution& sol = solution(m, eps);
    const int J = 4096;
    const double jc = 1024.0;
    const LatticeState s = init_from_wave(sol, *m, J, jc);
    const FourierInterpolant W(sol.W);
    const std::vector<double> r = s.strain();
    double err = 0.0;
    for (int j = 0; j < J; ++j) {
      const double x = eps * (j - jc);
      if (std::abs(x) < sol.W.grid().L() - 1.0) err = std::max(err, std::abs(r[j] - eps * eps * W.value(x)));
    }
    // r_j - eps^2 W(x_j) = eps^3 W'(x_j) / 2 + O(eps^4).
    const double ratio = err / std::pow(eps, 3);
    EXPECT_LT(ratio, 0.6 * derivative(sol.W, 1).max_abs());
    if (prev_ratio > 0.0) EXPECT_NEAR(ratio, prev_ratio, 0.1 * prev_ratio);
    prev_ratio = ratio;
  }
}

TEST(InitFromWave, MomentumReproducible) {
  const auto m = nnn1();
  const WaveSolution& sol = solution(m, 0.1);
  const LatticeState a = init_from_wave(sol, *m, 2048, 512.0);
  const LatticeState b = init_from_wave(sol, *m, 2048, 512.0);
  const double pa = std::accumulate(a.v.begin(), a.v.end(), 0.0);
  EXPECT_EQ(pa, std::accumulate(b.v.begin(), b.v.end(), 0.0));
  // sum_j v_j ~ -eps c int W dx.
  double integral = 0.0;
  for (double w : sol.W.values()) integral += w * sol.W.grid().dx();
  const double want = -0.1 * std::sqrt(sol.c_eps_sq) * integral;
  EXPECT_NEAR(pa, want, 1e-8 * std::abs(want));
  EXPECT_NEAR(a.seam_jump, 0.1 * integral, 1e-13);
}

TEST(InitFromWave, ZeroEpsIsFlat) {
  const auto m = nnn1();
  const DispersionProfile p = certify_type1(*m);
  const WaveSolution sol = solve_petviashvili(OperatorContext(m, p, kGrid, 0.0, p.sigma));
  const LatticeState s = init_from_wave(sol, *m, 256, 64.0);
  for (int j = 0; j < 256; ++j) {
    EXPECT_EQ(s.d[j], 0.0);
    EXPECT_EQ(s.v[j], 0.0);
  }
}

TEST(InitFromWave, Preconditions) {
  const auto m = nnn1();
  const WaveSolution& sol = solution(m, 0.1);
  EXPECT_THROW(init_from_wave(sol, *m, 1024, 256.0), SpecError);
  WaveSolution big = sol;
  big.W *= 200.0;
  EXPECT_THROW(init_from_wave(big, *m, 2048, 512.0), DomainError);
}

TEST(RunAndVerify, TranslationCovariance) {
  const auto m = nnn1();
  const WaveSolution& sol = solution(m, 0.1);
  SimulationOptions opts;
  opts.J = 2048;
  opts.T = 20.0;
  const VerificationReport a = run_and_verify(sol, m, opts);
  opts.jc_offset = 10.0;
  const VerificationReport b = run_and_verify(sol, m, opts);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  EXPECT_NEAR(a.measured_speed, b.measured_speed, 1e-10);
  EXPECT_NEAR(a.shape_error, b.shape_error, 1e-10);
  EXPECT_NEAR(a.energy_drift, b.energy_drift, 1e-10);
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    EXPECT_NEAR(b.trajectory[i].peak_position - a.trajectory[i].peak_position, 10.0, 1e-10);
    EXPECT_NEAR(b.trajectory[i].peak_value, a.trajectory[i].peak_value, 1e-10);
  }

  // The strain fields themselves are index shifts of one another.
  LatticeState sa = init_from_wave(sol, *m, 2048, 512.0), sb = init_from_wave(sol, *m, 2048, 522.0);
  const LatticeSimulator sim(m, 2);
  for (int i = 0; i < 100; ++i) {
    sim.step_verlet(sa, 0.02);
    sim.step_verlet(sb, 0.02);
  }
  const auto ra = sa.strain(), rb = sb.strain();
  double worst = 0.0;
  for (int j = 0; j < 2048; ++j) worst = std::max(worst, std::abs(rb[(j + 10) % 2048] - ra[j]));
  EXPECT_LT(worst, 1e-10);
}

TEST(RunAndVerify, SmallerEpsTracksBetter) {
  const auto m = nnn1();
  SimulationOptions opts;
  opts.J = 4096;
  opts.T = 100.0;
  const VerificationReport coarse = run_and_verify(solution(m, 0.2), m, opts);
  const VerificationReport fine = run_and_verify(solution(m, 0.1), m, opts);
  EXPECT_FALSE(coarse.early_stop);
  EXPECT_FALSE(fine.early_stop);
  EXPECT_LT(fine.speed_error, coarse.speed_error);
  EXPECT_LT(fine.shape_error, coarse.shape_error);
  EXPECT_LT(fine.speed_error, 0.01);
  EXPECT_LT(fine.shape_error, 0.05);
  EXPECT_LT(fine.energy_drift, 1e-6);
}

TEST(RunAndVerify, EarlyStopNearSeam) {
  const auto m = nnn1();
  SimulationOptions opts;
  opts.J = 1600;
  opts.T = 500.0;
  const VerificationReport r = run_and_verify(solution(m, 0.1), m, opts);
  EXPECT_TRUE(r.early_stop);
  EXPECT_LT(r.t_final, opts.T);
  EXPECT_FALSE(r.trajectory.empty());
}

TEST(RunAndVerify, RejectsLargeStep) {
  const auto m = nnn1();
  SimulationOptions opts;
  opts.J = 2048;
  opts.dt = 0.2 / std::sqrt(5.0);
  EXPECT_THROW(run_and_verify(solution(m, 0.1), m, opts), SpecError);
}

}  // namespace
}  // namespace lrfput
