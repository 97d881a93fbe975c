#include <gtest/gtest.h>

#include <cmath>

#include "lrfput/errors.hpp"
#include "lrfput/special_functions.hpp"
#include "support/test_support.hpp"

namespace lrfput {
namespace {

using testing::kPi;

// Direct partial sum of n terms (summed from the small end) plus the
// midpoint integral of the tail.
double zeta_oracle(double s, long n) {
  long double sum = 0.0L;
  for (long m = n; m >= 1; --m) sum += std::pow(static_cast<long double>(m), -static_cast<long double>(s));
  const long double tail = std::pow(n + 0.5L, 1.0L - s) / (s - 1.0L);
  return static_cast<double>(sum + tail);
}

TEST(Zeta, ClassicalValues) {
  EXPECT_NEAR(zeta(2.0), kPi * kPi / 6.0, 1e-13);
  EXPECT_NEAR(zeta(4.0), std::pow(kPi, 4) / 90.0, 1e-13);
  EXPECT_NEAR(zeta(6.0), std::pow(kPi, 6) / 945.0, 1e-13);
}

TEST(Zeta, MatchesLongPartialSum) {
  EXPECT_NEAR(zeta(3.5), zeta_oracle(3.5, 10'000'000), 1e-13);
  EXPECT_NEAR(zeta(1.5), zeta_oracle(1.5, 10'000'000), 1e-10);
}

TEST(Zeta, RejectsPoleAndBelow) {
  EXPECT_THROW(zeta(1.0), DomainError);
  EXPECT_THROW(zeta(0.5), DomainError);
}

TEST(Zeta, GreaterThanOneAndDecreasing) {
  double prev = zeta(2.0);
  for (double s = 2.05; s <= 10.0; s += 0.05) {
    const double z = zeta(s);
    EXPECT_GT(z, 1.0);
    EXPECT_LT(z, prev) << "s = " << s;
    prev = z;
  }
}

TEST(ZetaTail, AgreesWithDifferenceAtSmallM) {
  for (double s : {2.0, 3.5, 6.0}) {
    double partial = 0.0;
    for (int m = 1; m <= 10; ++m) partial += std::pow(m, -s);
    EXPECT_NEAR(zeta_tail(s, 10), zeta(s) - partial, 1e-13);
    EXPECT_DOUBLE_EQ(zeta_tail(s, 0), zeta(s));
  }
}

TEST(ZetaTail, RelativeAccuracyAtLargeM) {
  // Euler-Maclaurin: sum_{m > M} m^-4 = M^-3/3 - M^-4/2 + M^-5/3 + O(M^-7).
  const double M = 1e5;
  const double expect = std::pow(M, -3) / 3.0 - std::pow(M, -4) / 2.0 + std::pow(M, -5) / 3.0;
  EXPECT_NEAR(zeta_tail(4.0, 100000) / expect, 1.0, 1e-12);
}

TEST(ZetaTail, BoundDominatesTail) {
  for (double s : {3.2, 4.0, 7.0}) {
    for (std::int64_t M : {1, 10, 1000}) EXPECT_LE(zeta_tail(s, M), zeta_tail_bound(s, M));
  }
}

TEST(Sinc, SmallArgumentForms) {
  EXPECT_DOUBLE_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(kPi), 0.0, 1e-16);
  for (double z : {1e-6, 1e-3, 0.1, 1.0, 5.0}) {
    const double s = std::sin(0.5 * z) / (0.5 * z);
    EXPECT_NEAR(sinc_sq_half_minus_one(z), s * s - 1.0, 1e-15);
    // The direct quotient cancels for small z; use the series there.
    const double ref = z < 1e-2 ? -1.0 / 24.0 + z * z / 1920.0 : (s - 1.0) / (z * z);
    EXPECT_NEAR(sinc_half_minus_one_over_sq(z), ref, 1e-14);
  }
  // Leading terms of the remainder: z^4 / 360.
  EXPECT_NEAR(sinc_sq_half_second_remainder(1e-3) / 1e-12, 1.0 / 360.0, 1e-8);
  EXPECT_DOUBLE_EQ(sinc_half_minus_one_over_sq(0.0), -1.0 / 24.0);
}

}  // namespace
}  // namespace lrfput
