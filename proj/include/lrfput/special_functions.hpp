#pragma once

#include <cstdint>

namespace lrfput {

/// Riemann zeta function for real s > 1.
///
/// Direct summation of the first terms followed by an Euler-Maclaurin
/// correction for the remainder. Absolute error is below 1e-13 on (1, inf).
/// Throws DomainError for s <= 1.
double zeta(double s);

/// Tail sum  sum_{m > M} m^{-s}  for s > 1 and M >= 0 (equals zeta(s) for M = 0).
///
/// Evaluated without forming zeta(s) minus a partial sum, so it keeps full
/// relative precision for large M.
double zeta_tail(double s, std::int64_t M);

/// Integral-comparison upper bound  sum_{m > M} m^{-s} <= M^{1-s} / (s - 1),  M >= 1.
double zeta_tail_bound(double s, std::int64_t M);

/// Unnormalised sinc, sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// sinc^2(z/2) - 1, accurate for small z.
double sinc_sq_half_minus_one(double z);

/// sinc^2(z/2) - 1 + z^2/12, accurate for small z (it is O(z^4)).
double sinc_sq_half_second_remainder(double z);

/// (sinc(z/2) - 1) / z^2 with the removable value -1/24 at z = 0.
double sinc_half_minus_one_over_sq(double z);

}  // namespace lrfput
