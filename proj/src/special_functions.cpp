#include "lrfput/special_functions.hpp"

#include <array>
#include <cmath>
#include <string>

#include "lrfput/errors.hpp"

namespace lrfput {

namespace {

// B_2, B_4, ..., B_20.
constexpr std::array<double, 10> kBernoulliEven = {
    1.0 / 6.0,          -1.0 / 30.0,       1.0 / 42.0,     -1.0 / 30.0,
    5.0 / 66.0,         -691.0 / 2730.0,   7.0 / 6.0,      -3617.0 / 510.0,
    43867.0 / 798.0,    -174611.0 / 330.0};

// Euler-Maclaurin value of sum_{m >= n} m^{-s}, n >= 16.
double euler_maclaurin_from(double s, double n) {
  double total = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
  // rising = s (s+1) ... (s + 2j - 2), fact = (2j)!
  double rising = s;
  double fact = 2.0;
  double power = std::pow(n, -s - 1.0);
  for (std::size_t j = 0; j < kBernoulliEven.size(); ++j) {
    const double term = kBernoulliEven[j] / fact * rising * power;
    total += term;
    if (std::abs(term) < 1e-18 * std::abs(total)) break;
    const double k = 2.0 * static_cast<double>(j + 1);
    rising *= (s + k - 1.0) * (s + k);
    fact *= (k + 1.0) * (k + 2.0);
    power /= n * n;
  }
  return total;
}

constexpr std::int64_t kEulerMaclaurinStart = 16;

}  // namespace

double zeta_tail(double s, std::int64_t M) {
  if (!(s > 1.0)) {
    throw DomainError("zeta: s must exceed 1, got " + std::to_string(s));
  }
  if (M < 0) M = 0;
  const std::int64_t start = std::max<std::int64_t>(M + 1, kEulerMaclaurinStart);
  // Direct terms first, smallest last, then add the asymptotic remainder.
  double direct = 0.0;
  for (std::int64_t m = start - 1; m > M; --m) {
    direct += std::pow(static_cast<double>(m), -s);
  }
  return euler_maclaurin_from(s, static_cast<double>(start)) + direct;
}

double zeta(double s) { return zeta_tail(s, 0); }

double zeta_tail_bound(double s, std::int64_t M) {
  if (!(s > 1.0)) {
    throw DomainError("zeta_tail_bound: s must exceed 1");
  }
  if (M < 1) throw DomainError("zeta_tail_bound: M must be >= 1");
  return std::pow(static_cast<double>(M), 1.0 - s) / (s - 1.0);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double sinc_sq_half_minus_one(double z) {
  if (std::abs(z) < 1.0) {
    // sum_{n>=2} (-1)^{n+1} 2 z^{2n-2} / (2n)!
    const double z2 = z * z;
    double term = -2.0 * z2 / 24.0;  // n = 2
    double sum = term;
    for (int n = 3; n < 14; ++n) {
      term *= -z2 / ((2.0 * n - 1.0) * (2.0 * n));
      sum += term;
    }
    return sum;
  }
  const double s = sinc(0.5 * z);
  return s * s - 1.0;
}

double sinc_sq_half_second_remainder(double z) {
  if (std::abs(z) < 2.0) {
    const double z2 = z * z;
    double term = 2.0 * z2 * z2 / 720.0;  // n = 3
    double sum = term;
    for (int n = 4; n < 20; ++n) {
      term *= -z2 / ((2.0 * n - 1.0) * (2.0 * n));
      sum += term;
    }
    return sum;
  }
  const double s = sinc(0.5 * z);
  return s * s - 1.0 + z * z / 12.0;
}

double sinc_half_minus_one_over_sq(double z) {
  if (std::abs(z) < 2.0) {
    // sum_{n>=1} (-1)^n z^{2n-2} / (4^n (2n+1)!)
    const double z2 = z * z;
    double term = -1.0 / 24.0;
    double sum = term;
    for (int n = 2; n < 18; ++n) {
      term *= -z2 / (4.0 * (2.0 * n) * (2.0 * n + 1.0));
      sum += term;
    }
    return sum;
  }
  return (sinc(0.5 * z) - 1.0) / (z * z);
}

}  // namespace lrfput
