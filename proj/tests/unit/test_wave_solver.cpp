#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "lrfput/errors.hpp"
#include "lrfput/wave_solver.hpp"
#include "support/test_support.hpp"

namespace lrfput {
namespace {

using testing::cm_model;
using testing::kPi;
using testing::nnn_model;
using testing::sech2_half;

const Grid kGrid(40.0, 1024);

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

const DispersionProfile& profile_of(const std::shared_ptr<const LatticeModel>& m) {
  static std::map<const LatticeModel*, DispersionProfile> cache;
  auto it = cache.find(m.get());
  if (it == cache.end()) it = cache.emplace(m.get(), certify_type1(*m)).first;
  return it->second;
}

OperatorContext context(const std::shared_ptr<const LatticeModel>& m, double eps, const Grid& g = kGrid) {
  const DispersionProfile& p = profile_of(m);
  return OperatorContext(m, p, g, eps, p.sigma);
}

const std::shared_ptr<const LatticeModel>& nnn1() {
  static const auto m = nnn_model(1.0);
  return m;
}

// One contraction and one Petviashvili solve for CM a = 4 at eps = 0.1, shared by several tests.
struct Cm4Solves {
  OperatorContext ctx = context(cm_model(4.0), 0.1);
  WaveSolution contraction = solve_contraction(ctx);
  WaveSolution petviashvili = solve_petviashvili(ctx);
};
const Cm4Solves& cm4() {
  static const Cm4Solves s;
  return s;
}

TEST(KdvProfile, AmplitudeMatchesZetaRatio) {
  EXPECT_NEAR(context(cm_model(4.0), 0.0).W0_amplitude(), -5.0 / (8.0 * kPi * kPi), 1e-13);
  for (double a : {3.5, 4.0, 6.0}) {
    const double want = -boost::math::zeta(a - 2.0) / (4.0 * (a + 2.0) * boost::math::zeta(a));
    EXPECT_NEAR(context(cm_model(a), 0.0).W0_amplitude(), want, 1e-11 * std::abs(want)) << "a = " << a;
  }
}

TEST(KdvProfile, SolvesKdvAndIsEven) {
  const Grid g(40.0, 2048);
  for (const auto& m : {cm_model(4.0), nnn1()}) {
    const OperatorContext ctx = context(m, 0.0, g);
    const Field W0 = kdv_profile(ctx);
    Field r = -0.5 * ctx.lambda_dd0() * (W0 - derivative(W0, 2));
    r.axpy(-ctx.b(), dealiased_product(W0, W0));
    EXPECT_LT(testing::l2_norm(r), 1e-10);
    EXPECT_LT(W0.parity_defect(), 1e-15);
    EXPECT_LT(max_diff(W0, ctx.W0_amplitude() * sech2_half(g)), 1e-15);
  }
}

TEST(WaveSpeed, Formulae) {
  EXPECT_NEAR(wave_speed_sq(context(cm_model(4.0), 0.0)), 2.0 * std::pow(kPi, 4) / 9.0, 1e-12);
  EXPECT_NEAR(wave_speed_sq(context(cm_model(4.0), 0.1)), 2.0 * std::pow(kPi, 4) / 9.0 + kPi * kPi / 360.0,
              1e-12);
  EXPECT_NEAR(wave_speed_sq(context(nnn1(), 0.1)), 5.0 + 17.0 / 12.0 * 0.01, 1e-14);
}

TEST(Residual, ZeroFieldAndLeadingOrder) {
  const OperatorContext& ctx = cm4().ctx;
  EXPECT_EQ(residual(ctx, Field(kGrid)), 0.0);
  const double r0 = residual(ctx, ctx.W0());
  EXPECT_GT(r0, 0.0);
  EXPECT_LT(cm4().contraction.residual_H1, r0);
}

TEST(Contraction, CalogeroMoserConverges) {
  const WaveSolution& s = cm4().contraction;
  const OperatorContext& ctx = cm4().ctx;
  EXPECT_LE(s.residual_H1, 1e-8);
  EXPECT_NEAR(residual(ctx, s.W), s.residual_H1, 1e-12);
  EXPECT_DOUBLE_EQ(s.c_eps_sq, wave_speed_sq(ctx));
  EXPECT_EQ(s.method, SolveMethod::Contraction);
  EXPECT_TRUE(s.monotone);
  EXPECT_TRUE(s.nonpositive);
  EXPECT_LT(s.W.parity_defect(), 1e-10);
  EXPECT_LT(s.V.parity_defect(), 1e-10);
  Field rebuilt = ctx.W0();
  rebuilt.axpy(std::pow(s.eps, s.sigma), s.V);
  EXPECT_LT(max_diff(rebuilt, s.W), 1e-14);
  // Increments decay after the first three iterations.
  for (std::size_t i = 3; i < s.increments.size(); ++i) {
    if (s.increments[i - 1] > 1e-13) EXPECT_LT(s.increments[i], s.increments[i - 1]);
  }
}

TEST(Petviashvili, AgreesWithContraction) {
  const WaveSolution& p = cm4().petviashvili;
  EXPECT_EQ(p.method, SolveMethod::Petviashvili);
  EXPECT_LE(p.residual_H1, 1e-8);
  EXPECT_LT(sobolev_norm(p.W - cm4().contraction.W, 1.0), 1e-6);
  EXPECT_LT(p.W.parity_defect(), 1e-10);
}

TEST(Petviashvili, RecoversKdvProfileAtZeroEps) {
  for (const auto& m : {cm_model(4.0), nnn1()}) {
    const OperatorContext ctx = context(m, 0.0);
    const WaveSolution s = solve_petviashvili(ctx);
    EXPECT_LT(max_diff(s.W, ctx.W0()), 1e-9);
  }
}

TEST(Contraction, NnnCorrectionStaysBounded) {
  std::vector<double> n;
  for (double e : {0.2, 0.1, 0.05}) {
    const WaveSolution s = solve_contraction(context(nnn1(), e));
    EXPECT_LE(s.residual_H1, 1e-8);
    n.push_back(sobolev_norm(s.V, 1.0));
  }
  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  EXPECT_LT(*hi / *lo, 2.0);
}

TEST(Contraction, GridRefinementStable) {
  const WaveSolution a = solve_contraction(context(nnn1(), 0.1, Grid(40.0, 1024)));
  const WaveSolution b = solve_contraction(context(nnn1(), 0.1, Grid(40.0, 2048)));
  EXPECT_LT(std::abs(sobolev_norm(a.W, 1.0) - sobolev_norm(b.W, 1.0)), 1e-9);
}

TEST(Contraction, IterationCapRaises) {
  SolverOptions opts;
  opts.max_iter = 1;
  EXPECT_THROW(solve_contraction(context(nnn1(), 0.1), opts), SolverError);
}

TEST(Sweep, ConvergesAndFits) {
  const std::vector<double> eps = {0.4, 0.28, 0.2, 0.14, 0.1};
  const SweepReport r = correction_scaling_sweep(nnn1(), profile_of(nnn1()), kGrid, 2.0, eps);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_EQ(r.n_ok, 5);
  EXPECT_TRUE(r.fit_ok);
  EXPECT_NEAR(r.slope, 2.0, 0.5);
  // ||W_eps - W0|| shrinks with eps.
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].diff_H1, r.rows[i - 1].diff_H1);
}

TEST(Sweep, FailuresAreMarked) {
  SolverOptions opts;
  opts.max_iter = 1;
  const std::vector<double> eps = {0.4, 0.28, 0.2, 0.14, 0.1};
  const SweepReport r = correction_scaling_sweep(nnn1(), profile_of(nnn1()), kGrid, 2.0, eps, opts);
  EXPECT_EQ(r.n_ok, 0);
  EXPECT_FALSE(r.fit_ok);
  for (const SweepRow& row : r.rows) {
    EXPECT_FALSE(row.ok);
    EXPECT_FALSE(row.error.empty());
  }
}

TEST(Sweep, Preconditions) {
  EXPECT_THROW(correction_scaling_sweep(nnn1(), profile_of(nnn1()), kGrid, 2.0, {0.4, 0.2, 0.1}), SpecError);
  EXPECT_THROW(correction_scaling_sweep(nnn1(), profile_of(nnn1()), kGrid, 2.0, {0.8, 0.4, 0.2, 0.1, 0.05}),
               SpecError);
}

}  // namespace
}  // namespace lrfput
