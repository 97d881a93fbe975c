#pragma once

// Dispersion relation theta(k) = sum 4 alpha_m sin^2(mk/2), phase-speed
// function lambda(k) = theta(k)/k^2, and grid-based Type I certification.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrfput/lattice_catalog.hpp"

namespace lrfput {

/// sum_{m <= M} 4 alpha_m sin^2(m k / 2) over the model's truncated range.
double theta(const LatticeModel& model, double k);
/// Same sum for an explicit coefficient list (alpha[0] is alpha_1).
double theta(std::span<const double> alpha, double k);
/// Closed form of theta for the a = 4 Calogero-Moser lattice, valid for all k.
double theta_cm4_closed_form(double k);

/// c_0^2 = lambda(0) = sum alpha_m m^2 (exact zeta values for Calogero-Moser).
double c0_sq(const LatticeModel& model);
/// lambda''(0) = -(1/6) sum alpha_m m^4.
double lambda_dd0(const LatticeModel& model);
/// lambda(k) = sum alpha_m m^2 sinc^2(mk/2).
double lambda(const LatticeModel& model, double k);
/// Central second difference of lambda at 0 with step h.
double lambda_dd0_finite_difference(const LatticeModel& model, double h = 1e-4);

/// Evaluator for lambda and its Taylor remainders
///   T1(K) = lambda(K) - lambda(0),  T2(K) = T1(K) - lambda''(0) K^2 / 2,
/// both computed without cancellation against lambda(0).
///
/// For Calogero-Moser models the sum is extended (using the closed-form
/// coefficients) until m K >= 64, and sinc^2 in the remaining tail is replaced
/// by its mean 2 / (mK)^2.
class Dispersion {
 public:
  explicit Dispersion(const LatticeModel& model);

  double c0_sq() const { return c0_sq_; }
  double lambda_dd0() const { return lambda_dd0_; }
  /// c0^2 + T1 below |K| = 1; theta / K^2 above, which keeps relative
  /// accuracy near the zeros of theta.
  double lambda(double K) const;
  double T1(double K) const;
  double T2(double K) const;
  std::vector<double> T1(std::span<const double> K) const;
  std::vector<double> T2(std::span<const double> K) const;
  /// {T1, T2} at every K in one pass.
  std::pair<std::vector<double>, std::vector<double>> remainders(std::span<const double> K) const;
  /// Base summation range (before the small-K extension).
  int base_range() const { return base_range_; }

 private:
  // Returns {T1, T2}.
  std::pair<double, double> remainders(double K) const;
  double alpha(std::int64_t m) const;

  const LatticeModel* model_;
  double c0_sq_;
  double lambda_dd0_;
  int base_range_;
  std::int64_t max_range_;
  std::optional<double> cm_a_;
};

/// Coefficients alpha_1..alpha_{M_out} whose theta matches equispaced samples
/// theta(2 pi i / n), i = 0..n-1, via alpha_m = -b_m / 2 with b_m the discrete
/// cosine coefficients. Throws SpecError when n < 2 M_out + 2 and DomainError
/// ("invalid target") when |theta(0)| exceeds tol * max(1, max |theta|).
std::vector<double> coefficients_from_theta(std::span<const double> samples, int M_out,
                                            double tol = 1e-10);

struct SigmaEstimate {
  double sigma = 2.0;
  double slope = 4.0;  ///< fitted log-log slope of |T2|
  bool analytic = false;  ///< T2 vanished on the fit range
  std::string note;
};

/// Least-squares slope of log|T2(k)| against log k on n log-spaced points of
/// [k_lo, k_hi], minus 2, clamped to (0, 2].
SigmaEstimate estimate_sigma(const LatticeModel& model, double k_lo = 1e-3, double k_hi = 1e-1,
                             int n_points = 32);

struct Type1Grid {
  double k_max = 12.566370614359172;  // 4 pi
  int n_samples = 4096;
};

struct DispersionProfile {
  PotentialFamily family = PotentialFamily::CustomCoefficients;
  double c0_sq = 0.0;
  double lambda_dd0 = 0.0;
  double k_star = 0.0;
  double mu_star = 0.0;
  double sigma = 0.0;       ///< rounded down to two decimals; used downstream
  double sigma_fit = 0.0;   ///< raw fitted value
  double sup_outside = 0.0; ///< estimate of sup_{|k| >= k_star} lambda
  double lambda_lower = 0.0;
  bool bounded_below = false;  ///< condition (i)
  bool concave_at_zero = false;  ///< condition (ii)
  bool local_bounds = false;  ///< condition (iii)
  bool subsonic_outside = false;  ///< condition (iv)
  bool type1_certified = false;
  double k_max = 0.0;
  int n_samples = 0;
  std::vector<std::string> notes;
};

/// Certifies the Type I conditions on a uniform sample of [0, k_max] with
/// explicit envelopes for k > k_max. Never throws for valid input; failures
/// are recorded in the returned profile. Requires n_samples >= 2048 and
/// k_max >= 4 pi (SpecError otherwise).
DispersionProfile certify_type1(const LatticeModel& model, const Type1Grid& grid = {});

}  // namespace lrfput
