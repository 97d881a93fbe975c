#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

#include "lrfput/errors.hpp"
#include "lrfput/lattice_catalog.hpp"
#include "lrfput/special_functions.hpp"
#include "support/test_support.hpp"

namespace lrfput {
namespace {

using testing::cm_model;
using testing::kPi;
using testing::nnn_model;
using Big = boost::multiprecision::cpp_bin_float_50;

// Psi'_m(eta) for r^-a in 50-digit arithmetic.
double cm_psi_prime_oracle(double a, int m, double eta) {
  const Big A(a), M(m), E(eta);
  const Big phi = -A * pow(M + E, -A - 1);
  const Big varsigma = -A * pow(M, -A - 1);
  const Big alpha = A * (A + 1) * pow(M, -A - 2);
  const Big beta = -A * (A + 1) * (A + 2) * pow(M, -A - 3) / 2;
  return static_cast<double>(phi - varsigma - alpha * E - beta * E * E);
}

std::vector<std::shared_ptr<const LatticeModel>> catalog() {
  std::vector<std::shared_ptr<const LatticeModel>> out = {cm_model(4.0), cm_model(3.5), cm_model(6.0),
                                                          nnn_model(1.0), nnn_model(0.25, 1.0, 0.5)};
  PotentialSpec fput;
  fput.payload = ClassicalFputSpec{1.0, 1.0, 0.3};
  out.push_back(std::make_shared<const LatticeModel>(build_model(fput, 1e-10)));
  PotentialSpec fr;
  fr.payload = FiniteRangeSpec{{{1.0, 0.5, 0.1}, {0.3, -0.2, 0.05}, {0.1, 0.0, 0.0}}};
  out.push_back(std::make_shared<const LatticeModel>(build_model(fr, 1e-10)));
  return out;
}

TEST(BuildModel, CalogeroMoserCoefficients) {
  const auto m = cm_model(4.0);
  EXPECT_DOUBLE_EQ(m->alpha(1), 20.0);
  EXPECT_DOUBLE_EQ(m->beta(1), -60.0);
  EXPECT_DOUBLE_EQ(m->varsigma(1), -4.0);
  EXPECT_DOUBLE_EQ(m->alpha(2), 20.0 * std::pow(2.0, -6));
  EXPECT_DOUBLE_EQ(m->delta_star(), 0.5);
}

TEST(BuildModel, NnnIsFiniteRange) {
  const auto m = nnn_model(1.0);
  EXPECT_EQ(m->range(), 2);
  EXPECT_DOUBLE_EQ(m->alpha(1), 1.0);
  EXPECT_DOUBLE_EQ(m->alpha(2), 1.0);
  EXPECT_EQ(m->tails().alpha_m2, 0.0);
  EXPECT_EQ(m->tails().beta_m5, 0.0);
  EXPECT_EQ(m->tails().gamma_m4, 0.0);
}

TEST(BuildModel, TruncatedSoundSpeedSum) {
  // sum_m alpha_m m^2 = 20 zeta(4) = 2 pi^4 / 9 for a = 4.
  const auto m = cm_model(4.0);
  double s = 0.0;
  for (int k = m->range(); k >= 1; --k) s += m->alpha(k) * k * k;
  EXPECT_NEAR(s, 2.0 * std::pow(kPi, 4) / 9.0, 1e-10);
  EXPECT_LE(m->tails().alpha_m2, 1e-10);
}

TEST(BuildModel, RangeIsLeastAdmissible) {
  const auto m = cm_model(4.0);
  const int M = m->range();
  // gamma_m m^4 tail decides M for a = 4; one fewer term breaks the tolerance.
  const double a = 4.0, c = a * (a + 1) * (a + 2) * (a + 3) * std::pow(2.0, a + 4) / 6.0;
  EXPECT_LT(c * zeta_tail_bound(a, M), 1e-10);
  EXPECT_GE(c * zeta_tail_bound(a, M - 1), 1e-10);
}

TEST(BuildModel, Deterministic) {
  PotentialSpec s;
  s.payload = CalogeroMoserSpec{4.5};
  const LatticeModel a = build_model(s, 1e-9), b = build_model(s, 1e-9);
  ASSERT_EQ(a.range(), b.range());
  for (int m = 1; m <= a.range(); ++m) {
    ASSERT_EQ(a.alpha(m), b.alpha(m));
    ASSERT_EQ(a.beta(m), b.beta(m));
    ASSERT_EQ(a.gamma(m), b.gamma(m));
  }
}

TEST(BuildModel, RejectsInvalidSpecs) {
  PotentialSpec cm;
  cm.payload = CalogeroMoserSpec{3.0};
  EXPECT_THROW(build_model(cm, 1e-10), SpecError);
  PotentialSpec nnn;
  nnn.payload = NnnSpec{1.0, -8.0, 1.0, 0.0, 0.0};
  try {
    build_model(nnn, 1e-10);
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate quadratic coefficient"), std::string::npos);
  }
  PotentialSpec ok;
  ok.payload = CalogeroMoserSpec{4.0};
  EXPECT_THROW(build_model(ok, 0.0), SpecError);
}

TEST(PsiPrime, VanishesAtZero) {
  for (const auto& m : catalog()) {
    for (int k = 1; k <= std::min(m->range(), 5); ++k) EXPECT_EQ(psi_prime(*m, k, 0.0), 0.0);
  }
}

TEST(PsiPrime, CalogeroMoserMatchesExtendedPrecision) {
  // -4 (1.1)^-5 + 4 - 20 (0.1) + 60 (0.01) = 0.1163...
  const double v = psi_prime(*cm_model(4.0), 1, 0.1);
  EXPECT_NEAR(v, cm_psi_prime_oracle(4.0, 1, 0.1), 1e-14);
  EXPECT_NEAR(v, 0.11632, 1e-5);
  for (int m : {1, 2, 7, 40}) {
    for (double x : {-0.3, -0.04, -1e-4, 1e-6, 0.02, 0.049, 0.051, 0.4}) {
      const double eta = x * m;
      const double ref = cm_psi_prime_oracle(4.0, m, eta);
      EXPECT_NEAR(psi_prime(*cm_model(4.0), m, eta), ref, 1e-13 * std::abs(ref) + 1e-300)
          << "m = " << m << ", eta = " << eta;
    }
  }
}

TEST(PsiPrime, CubicBoundAtSpecimenPoint) {
  // |Psi'_2(+-0.05)| <= gamma_2 0.05^3, with 4*5*6*7*2^-8 as a sharper candidate constant.
  const auto m = cm_model(4.0);
  for (double eta : {-0.05, 0.05}) {
    const double v = std::abs(psi_prime(*m, 2, eta));
    EXPECT_LE(v, 4.0 * 5 * 6 * 7 / 256.0 * std::pow(0.05, 3));
    EXPECT_LE(v, m->gamma(2) * std::pow(0.05, 3));
  }
}

TEST(PsiPrime, OutOfDomainRejected) {
  const auto m = cm_model(4.0);
  EXPECT_THROW(psi_prime(*m, 1, 0.6), DomainError);
  EXPECT_THROW(psi_second(*m, 3, -1.6), DomainError);
  EXPECT_NO_THROW(psi_prime(*m, 3, -1.4));
}

TEST(PsiPrime, SeriesSwitchContinuity) {
  for (double a : {3.5, 4.0, 6.0}) {
    const CalogeroMoserRemainder r(a);
    const double x = CalogeroMoserRemainder::series_switch();
    for (double s : {-1.0, 1.0}) {
      for (int m : {1, 2, 10}) {
        const double scale = a * std::pow(m, -a - 1.0);
        EXPECT_LT(scale * std::abs(r.phi_series(s * x) - r.phi_direct(s * x)), 1e-12);
      }
    }
  }
}

// Property: |Psi'| <= gamma |eta|^3 and |Psi''| <= 3 gamma eta^2 on the domain.
TEST(PsiPrime, RemainderBoundsHoldOnRandomPoints) {
  std::mt19937_64 rng(11);
  for (const auto& model : catalog()) {
    std::uniform_int_distribution<int> pick(1, std::min(model->range(), 60));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const int m = pick(rng);
      const double eta = u(rng) * m * model->delta_star();
      const double g = model->gamma(m);
      EXPECT_LE(std::abs(psi_prime(*model, m, eta)), g * std::pow(std::abs(eta), 3) * (1 + 1e-12) + 1e-300);
      EXPECT_LE(std::abs(psi_second(*model, m, eta)), 3.0 * g * eta * eta * (1 + 1e-12) + 1e-300);
    }
  }
}

TEST(PsiPrime, SecondDerivativeMatchesDifferenceQuotient) {
  const auto m = cm_model(4.0);
  for (double eta : {-0.2, 0.03, 0.3}) {
    const double h = 1e-5;
    const double fd = (psi_prime(*m, 1, eta + h) - psi_prime(*m, 1, eta - h)) / (2 * h);
    EXPECT_NEAR(psi_second(*m, 1, eta), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(BCoefficient, Values) {
  EXPECT_NEAR(b_coefficient(*cm_model(4.0)).value, -2.0 * std::pow(kPi, 4) / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(b_coefficient(*nnn_model(1.0, 1.0, 0.0)).value, 1.0);
  EXPECT_DOUBLE_EQ(b_coefficient(*nnn_model(1.0, 1.0, 0.5)).value, 5.0);
}

TEST(CheckAssumptions, CalogeroMoserFour) {
  const AssumptionReport r = check_assumptions(*cm_model(4.0));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.b_certified);
  // sum |beta_m| m^5 = 60 zeta(2) = 10 pi^2.
  EXPECT_NEAR(r.sum_abs_beta_m5, 10.0 * kPi * kPi, r.sum_abs_beta_m5_tail + 1e-9);
  EXPECT_TRUE(r.beta_m5_finite);
  EXPECT_TRUE(r.gamma_m4_finite);
}

TEST(CheckAssumptions, FiniteRangeExact) {
  const AssumptionReport r = check_assumptions(*nnn_model(0.3));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.sum_abs_beta_m5_tail, 0.0);
  EXPECT_DOUBLE_EQ(r.sum_abs_beta_m5, 1.0);
}

TEST(CheckAssumptions, SlowTailsStillPass) {
  const auto m = cm_model(3.2, 1e-6);
  const AssumptionReport r = check_assumptions(*m);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.sum_abs_beta_m5_tail, 0.0);
  // sum |beta_m| m^5 = a(a+1)(a+2)/2 zeta(a-2).
  EXPECT_NEAR(r.sum_abs_beta_m5, 3.2 * 4.2 * 5.2 / 2.0 * zeta(1.2), r.sum_abs_beta_m5_tail + 1e-6);
}

TEST(PairEnergy, DerivativeIsForce) {
  for (const auto& model : catalog()) {
    for (double eta : {-0.2, 0.01, 0.15}) {
      const double h = 1e-6;
      const double fd = (model->pair_energy(1, eta + h) - model->pair_energy(1, eta - h)) / (2 * h);
      EXPECT_NEAR(fd, model->force_minus_varsigma(1, eta), 1e-8);
    }
    EXPECT_EQ(model->pair_energy(1, 0.0), 0.0);
  }
}

}  // namespace
}  // namespace lrfput
