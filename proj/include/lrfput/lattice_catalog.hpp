#pragma once

// Lattice potential families, their expansion coefficients about equilibrium
// and the cubic remainders Psi'_m.
//
// Every family is expanded as
//   Phi'_m(r_* m + eta) = varsigma_m + alpha_m eta + beta_m eta^2 + Psi'_m(eta)
// with |Psi'_m(eta)| <= gamma_m |eta|^3 and |Psi''_m(eta)| <= 3 gamma_m eta^2
// for |eta| <= m * delta_star.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lrfput {

// ---------------------------------------------------------------------------
// Remainders
// ---------------------------------------------------------------------------

/// Cubic remainder Psi'_m of the force expansion, with its derivative and
/// antiderivative (the latter is needed for the lattice energy).
class Remainder {
 public:
  virtual ~Remainder() = default;
  /// Psi'_m(eta).
  virtual double psi_prime(int m, double eta) const = 0;
  /// Psi''_m(eta).
  virtual double psi_second(int m, double eta) const = 0;
  /// Psi_m(eta) = int_0^eta Psi'_m.
  virtual double psi(int m, double eta) const = 0;
  /// Bulk Psi'_m; out may alias eta.
  virtual void psi_prime_many(int m, std::span<const double> eta, std::span<double> out) const;
};

/// Psi'_m(eta) = c_m eta^3 (quartic term of the potential), zero beyond the list.
class PolynomialRemainder final : public Remainder {
 public:
  explicit PolynomialRemainder(std::vector<double> cubic) : cubic_(std::move(cubic)) {}
  double psi_prime(int m, double eta) const override;
  double psi_second(int m, double eta) const override;
  double psi(int m, double eta) const override;
  void psi_prime_many(int m, std::span<const double> eta, std::span<double> out) const override;
  double cubic(int m) const;

 private:
  std::vector<double> cubic_;
};

/// Remainder of Phi_m(r) = r^{-a} expanded about r = m.
///
/// Writing x = eta / m, Psi'_m(eta) = -a m^{-a-1} phi(x) with
/// phi(x) = (1+x)^{-a-1} - 1 + (a+1) x - (a+1)(a+2) x^2 / 2.
/// For |x| below series_switch() the binomial series is summed instead of the
/// closed form; the closed form cancels catastrophically near x = 0.
class CalogeroMoserRemainder final : public Remainder {
 public:
  explicit CalogeroMoserRemainder(double a);
  double psi_prime(int m, double eta) const override;
  double psi_second(int m, double eta) const override;
  double psi(int m, double eta) const override;
  void psi_prime_many(int m, std::span<const double> eta, std::span<double> out) const override;

  /// |x| threshold below which the series branch is used.
  static constexpr double series_switch() { return 0.05; }
  /// Both branches, exposed for continuity checks.
  double phi_series(double x) const;
  double phi_direct(double x) const;
  double a() const { return a_; }
  /// Series coefficients of phi, starting at x^3.
  const std::vector<double>& phi_coefficients() const { return phi_coeff_; }

 private:
  double phi(double x) const;
  double dphi(double x) const;
  double chi(double x) const;

  double a_;
  std::vector<double> phi_coeff_;   // x^3, x^4, ...
  std::vector<double> dphi_coeff_;  // x^2, x^3, ...
  std::vector<double> chi_coeff_;   // x^4, x^5, ...
};

/// User-supplied remainder functions for one interaction range m.
struct RemainderFunctions {
  std::function<double(double)> psi_prime;
  std::function<double(double)> psi_second;
  std::function<double(double)> psi;
};

/// Remainder given term-by-term by callables (m = 1 is element 0).
class FunctionRemainder final : public Remainder {
 public:
  explicit FunctionRemainder(std::vector<RemainderFunctions> terms) : terms_(std::move(terms)) {}
  double psi_prime(int m, double eta) const override;
  double psi_second(int m, double eta) const override;
  double psi(int m, double eta) const override;

 private:
  std::vector<RemainderFunctions> terms_;
};

// ---------------------------------------------------------------------------
// Potential specifications
// ---------------------------------------------------------------------------

/// One finite-range interaction: Phi'_m(r_* m + eta) - varsigma_m
///   = alpha eta + beta eta^2 + cubic eta^3.
struct PolynomialTerm {
  double alpha = 0.0;
  double beta = 0.0;
  double cubic = 0.0;
};

struct ClassicalFputSpec {
  double alpha1 = 1.0;
  double beta1 = 1.0;
  double cubic1 = 0.0;
};

struct FiniteRangeSpec {
  std::vector<PolynomialTerm> terms;  // terms[m-1]
};

/// Next-nearest-neighbour lattice: Phi'_1(r) = r + beta1 r^2 + ...,
/// Phi'_2(r) = g r + beta2 r^2 + ...
struct NnnSpec {
  double g = 1.0;
  double beta1 = 1.0;
  double beta2 = 0.0;
  double cubic1 = 0.0;
  double cubic2 = 0.0;
};

/// Phi_m(r) = r^{-a} with equilibrium spacing r_* = 1.
struct CalogeroMoserSpec {
  double a = 4.0;
};

struct CustomCoefficientsSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;     // remainder bounds; cubic remainders c_m = gamma_m
  std::vector<double> varsigma;  // optional, zero when empty
};

enum class PotentialFamily { ClassicalFPUT, FiniteRange, NNN, CalogeroMoser, CustomCoefficients };

std::string to_string(PotentialFamily family);

struct PotentialSpec {
  std::variant<ClassicalFputSpec, FiniteRangeSpec, NnnSpec, CalogeroMoserSpec, CustomCoefficientsSpec>
      payload;
  /// Radius of the expansion domain; defaults to 1/2 for Calogero-Moser and 1 otherwise.
  std::optional<double> delta_star;
  /// Replaces the default polynomial remainders of finite families.
  std::shared_ptr<const Remainder> remainder_override;

  PotentialFamily family() const;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// Certified bounds on the coefficient sums dropped by truncating at M.
struct TailBounds {
  double alpha_m2 = 0.0;  ///< sum_{m>M} alpha_m m^2
  double beta_m3 = 0.0;   ///< sum_{m>M} |beta_m| m^3
  double beta_m5 = 0.0;   ///< sum_{m>M} |beta_m| m^5
  double gamma_m4 = 0.0;  ///< sum_{m>M} gamma_m m^4
};

/// Immutable lattice model: coefficients for 1 <= m <= M plus tail data.
class LatticeModel {
 public:
  PotentialFamily family() const { return family_; }
  double r_star() const { return r_star_; }
  double delta_star() const { return delta_star_; }
  /// Interaction-range truncation.
  int range() const { return range_; }
  double trunc_tol() const { return trunc_tol_; }
  /// Calogero-Moser exponent, when the model is of that family.
  std::optional<double> cm_exponent() const { return cm_exponent_; }

  double alpha(int m) const { return alpha_[m - 1]; }
  double beta(int m) const { return beta_[m - 1]; }
  double gamma(int m) const { return gamma_[m - 1]; }
  double varsigma(int m) const { return varsigma_[m - 1]; }
  std::span<const double> alphas() const { return alpha_; }
  std::span<const double> betas() const { return beta_; }
  std::span<const double> gammas() const { return gamma_; }

  const TailBounds& tails() const { return tails_; }
  const Remainder& remainder() const { return *remainder_; }

  /// sum_{m > M} alpha_m m^p, evaluated exactly for closed-form families
  /// and zero for finite families.
  double alpha_moment_tail(double p) const;
  /// Full moment sum_m alpha_m m^p (truncated sum plus tail).
  double alpha_moment(double p) const;
  /// Full moment sum_m beta_m m^p.
  double beta_moment(double p) const;
  /// Full moment sum_m |beta_m| m^p.
  double abs_beta_moment(double p) const;
  /// Full moment sum_m gamma_m m^p.
  double gamma_moment(double p) const;

  /// Phi'_m(r_* m + eta) - varsigma_m evaluated through the expansion.
  double force_minus_varsigma(int m, double eta) const;
  /// Phi_m(r_* m + eta) - Phi_m(r_* m) - varsigma_m eta.
  double pair_energy(int m, double eta) const;

 private:
  friend LatticeModel build_model(const PotentialSpec&, double);

  PotentialFamily family_ = PotentialFamily::CustomCoefficients;
  double r_star_ = 0.0;
  double delta_star_ = 1.0;
  int range_ = 0;
  double trunc_tol_ = 0.0;
  std::optional<double> cm_exponent_;
  std::vector<double> alpha_, beta_, gamma_, varsigma_;
  TailBounds tails_;
  std::shared_ptr<const Remainder> remainder_;
};

/// Builds the coefficient sequences for a potential family.
///
/// For Calogero-Moser the range M is the least integer for which the tails of
/// sum alpha_m m^2, sum |beta_m| m^3 and sum gamma_m m^4 are all below
/// trunc_tol (integral comparison). Finite families use their own range.
/// Throws SpecError for invalid payloads (including a <= 3) and
/// DegeneracyError when b = sum beta_m m^3 vanishes.
LatticeModel build_model(const PotentialSpec& spec, double trunc_tol);

/// Psi'_m(eta); DomainError when |eta| > m * delta_star.
double psi_prime(const LatticeModel& model, int m, double eta);
/// Psi''_m(eta); DomainError when |eta| > m * delta_star.
double psi_second(const LatticeModel& model, int m, double eta);

/// Result of b_coefficient: value plus the truncation bound it was certified against.
struct BCoefficient {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// b = sum_m beta_m m^3. DegeneracyError when |b| does not exceed the tail bound.
BCoefficient b_coefficient(const LatticeModel& model);

struct AssumptionReport {
  double sum_abs_beta_m5 = 0.0;
  double sum_abs_beta_m5_tail = 0.0;
  bool beta_m5_finite = false;
  double sum_gamma_m4 = 0.0;
  double sum_gamma_m4_tail = 0.0;
  bool gamma_m4_finite = false;
  double b = 0.0;
  double b_tail_bound = 0.0;
  bool b_certified = false;
  /// Tail bounds of the truncated sums are below trunc_tol.
  bool tails_within_tolerance = false;
  bool pass = false;
};

/// Checks the summability and non-degeneracy assumptions; never throws.
AssumptionReport check_assumptions(const LatticeModel& model);

}  // namespace lrfput
