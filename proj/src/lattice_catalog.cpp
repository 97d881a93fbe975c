#include "lrfput/lattice_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrfput/errors.hpp"
#include "lrfput/special_functions.hpp"

namespace lrfput {

namespace {

constexpr int kSeriesTerms = 24;
constexpr std::int64_t kMaxRange = 2'000'000;

// Coefficients of (1+x)^{-s} = sum_j c_j x^j.
std::vector<double> binomial_series(double s, int terms) {
  std::vector<double> c(terms);
  c[0] = 1.0;
  for (int j = 1; j < terms; ++j) {
    c[j] = c[j - 1] * (-(s + j - 1.0)) / static_cast<double>(j);
  }
  return c;
}

double horner(const std::vector<double>& coeff, double x) {
  double acc = 0.0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Least M >= 1 with C M^{1-s} / (s-1) < tol.
std::int64_t range_for_tail(double C, double s, double tol) {
  if (C <= 0.0) return 1;
  const double M = std::pow(C / ((s - 1.0) * tol), 1.0 / (s - 1.0));
  if (!std::isfinite(M) || M > static_cast<double>(kMaxRange)) return kMaxRange + 1;
  auto r = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(M)));
  while (r > 1 && C * zeta_tail_bound(s, r - 1) < tol) --r;
  while (C * zeta_tail_bound(s, r) >= tol) ++r;
  return r;
}

struct CmConstants {
  double a;
  double alpha_c;  // alpha_m = alpha_c m^{-a-2}
  double beta_c;   // beta_m = beta_c m^{-a-3}
  double gamma_c;  // gamma_m = gamma_c m^{-a-4}
};

CmConstants cm_constants(double a, double delta_star) {
  CmConstants c{};
  c.a = a;
  c.alpha_c = a * (a + 1.0);
  c.beta_c = -0.5 * a * (a + 1.0) * (a + 2.0);
  // Lipschitz constant of Phi'''_m on |eta| <= m delta_star, divided by 6:
  // sup |Phi''''_m| over r in [m(1-delta_star), m(1+delta_star)].
  c.gamma_c = a * (a + 1.0) * (a + 2.0) * (a + 3.0) * std::pow(1.0 - delta_star, -a - 4.0) / 6.0;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Remainders
// ---------------------------------------------------------------------------

void Remainder::psi_prime_many(int m, std::span<const double> eta, std::span<double> out) const {
  for (std::size_t i = 0; i < eta.size(); ++i) out[i] = psi_prime(m, eta[i]);
}

double PolynomialRemainder::cubic(int m) const {
  return (m >= 1 && static_cast<std::size_t>(m) <= cubic_.size()) ? cubic_[m - 1] : 0.0;
}

double PolynomialRemainder::psi_prime(int m, double eta) const { return cubic(m) * eta * eta * eta; }

double PolynomialRemainder::psi_second(int m, double eta) const { return 3.0 * cubic(m) * eta * eta; }

double PolynomialRemainder::psi(int m, double eta) const {
  const double e2 = eta * eta;
  return 0.25 * cubic(m) * e2 * e2;
}

void PolynomialRemainder::psi_prime_many(int m, std::span<const double> eta,
                                         std::span<double> out) const {
  const double c = cubic(m);
  for (std::size_t i = 0; i < eta.size(); ++i) out[i] = c * eta[i] * eta[i] * eta[i];
}

CalogeroMoserRemainder::CalogeroMoserRemainder(double a) : a_(a) {
  const auto c1 = binomial_series(a + 1.0, kSeriesTerms + 3);
  phi_coeff_.assign(c1.begin() + 3, c1.end());
  for (int j = 3; j < kSeriesTerms + 3; ++j) dphi_coeff_.push_back(j * c1[j]);
  const auto c0 = binomial_series(a, kSeriesTerms + 4);
  chi_coeff_.assign(c0.begin() + 4, c0.end());
}

double CalogeroMoserRemainder::phi_series(double x) const { return x * x * x * horner(phi_coeff_, x); }

double CalogeroMoserRemainder::phi_direct(double x) const {
  const double b = a_ + 1.0;
  return std::pow(1.0 + x, -b) - 1.0 + b * x - 0.5 * b * (a_ + 2.0) * x * x;
}

double CalogeroMoserRemainder::phi(double x) const {
  return std::abs(x) < series_switch() ? phi_series(x) : phi_direct(x);
}

double CalogeroMoserRemainder::dphi(double x) const {
  if (std::abs(x) < series_switch()) return x * x * horner(dphi_coeff_, x);
  const double b = a_ + 1.0;
  return -b * std::pow(1.0 + x, -b - 1.0) + b - b * (a_ + 2.0) * x;
}

double CalogeroMoserRemainder::chi(double x) const {
  if (std::abs(x) < series_switch()) {
    const double x2 = x * x;
    return x2 * x2 * horner(chi_coeff_, x);
  }
  const double a = a_;
  return std::pow(1.0 + x, -a) - 1.0 + a * x - 0.5 * a * (a + 1.0) * x * x +
         a * (a + 1.0) * (a + 2.0) * x * x * x / 6.0;
}

double CalogeroMoserRemainder::psi_prime(int m, double eta) const {
  const double mm = static_cast<double>(m);
  return -a_ * std::pow(mm, -a_ - 1.0) * phi(eta / mm);
}

double CalogeroMoserRemainder::psi_second(int m, double eta) const {
  const double mm = static_cast<double>(m);
  return -a_ * std::pow(mm, -a_ - 2.0) * dphi(eta / mm);
}

double CalogeroMoserRemainder::psi(int m, double eta) const {
  const double mm = static_cast<double>(m);
  return std::pow(mm, -a_) * chi(eta / mm);
}

void CalogeroMoserRemainder::psi_prime_many(int m, std::span<const double> eta,
                                            std::span<double> out) const {
  const double mm = static_cast<double>(m);
  const double scale = -a_ * std::pow(mm, -a_ - 1.0);
  const double inv_m = 1.0 / mm;
  double xmax = 0.0;
  for (double e : eta) xmax = std::max(xmax, std::abs(e));
  xmax *= inv_m;
  if (xmax >= series_switch()) {
    for (std::size_t i = 0; i < eta.size(); ++i) out[i] = scale * phi(eta[i] * inv_m);
    return;
  }
  // Drop series terms below 1e-17 of the leading one at xmax.
  std::size_t terms = 1;
  double p = 1.0;
  while (terms < phi_coeff_.size()) {
    p *= xmax;
    if (std::abs(phi_coeff_[terms]) * p < 1e-17 * std::abs(phi_coeff_[0])) break;
    ++terms;
  }
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double x = eta[i] * inv_m;
    double acc = 0.0;
    for (std::size_t j = terms; j-- > 0;) acc = acc * x + phi_coeff_[j];
    out[i] = scale * x * x * x * acc;
  }
}

namespace {
const RemainderFunctions& term_at(const std::vector<RemainderFunctions>& terms, int m) {
  static const RemainderFunctions kZero{};
  return (m >= 1 && static_cast<std::size_t>(m) <= terms.size()) ? terms[m - 1] : kZero;
}
}  // namespace

double FunctionRemainder::psi_prime(int m, double eta) const {
  const auto& t = term_at(terms_, m);
  return t.psi_prime ? t.psi_prime(eta) : 0.0;
}

double FunctionRemainder::psi_second(int m, double eta) const {
  const auto& t = term_at(terms_, m);
  return t.psi_second ? t.psi_second(eta) : 0.0;
}

double FunctionRemainder::psi(int m, double eta) const {
  const auto& t = term_at(terms_, m);
  return t.psi ? t.psi(eta) : 0.0;
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

std::string to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::ClassicalFPUT: return "fput";
    case PotentialFamily::FiniteRange: return "finite";
    case PotentialFamily::NNN: return "nnn";
    case PotentialFamily::CalogeroMoser: return "cm";
    case PotentialFamily::CustomCoefficients: return "custom";
  }
  return "unknown";
}

PotentialFamily PotentialSpec::family() const {
  return static_cast<PotentialFamily>(payload.index());
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

double LatticeModel::alpha_moment_tail(double p) const {
  if (!cm_exponent_) return 0.0;
  const double a = *cm_exponent_;
  return a * (a + 1.0) * zeta_tail(a + 2.0 - p, range_);
}

double LatticeModel::alpha_moment(double p) const {
  double sum = 0.0;
  for (int m = range_; m >= 1; --m) sum += alpha_[m - 1] * std::pow(static_cast<double>(m), p);
  return sum + alpha_moment_tail(p);
}

double LatticeModel::beta_moment(double p) const {
  double sum = 0.0;
  for (int m = range_; m >= 1; --m) sum += beta_[m - 1] * std::pow(static_cast<double>(m), p);
  if (cm_exponent_) {
    const double a = *cm_exponent_;
    sum += -0.5 * a * (a + 1.0) * (a + 2.0) * zeta_tail(a + 3.0 - p, range_);
  }
  return sum;
}

double LatticeModel::abs_beta_moment(double p) const {
  double sum = 0.0;
  for (int m = range_; m >= 1; --m) {
    sum += std::abs(beta_[m - 1]) * std::pow(static_cast<double>(m), p);
  }
  if (cm_exponent_) {
    const double a = *cm_exponent_;
    sum += 0.5 * a * (a + 1.0) * (a + 2.0) * zeta_tail(a + 3.0 - p, range_);
  }
  return sum;
}

double LatticeModel::gamma_moment(double p) const {
  double sum = 0.0;
  for (int m = range_; m >= 1; --m) sum += gamma_[m - 1] * std::pow(static_cast<double>(m), p);
  if (cm_exponent_) {
    const auto c = cm_constants(*cm_exponent_, delta_star_);
    sum += c.gamma_c * zeta_tail(*cm_exponent_ + 4.0 - p, range_);
  }
  return sum;
}

double LatticeModel::force_minus_varsigma(int m, double eta) const {
  return alpha_[m - 1] * eta + beta_[m - 1] * eta * eta + remainder_->psi_prime(m, eta);
}

double LatticeModel::pair_energy(int m, double eta) const {
  const double e2 = eta * eta;
  return 0.5 * alpha_[m - 1] * e2 + beta_[m - 1] * e2 * eta / 3.0 + remainder_->psi(m, eta);
}

namespace {

void fill_polynomial(LatticeModel& model, std::vector<double>& alpha, std::vector<double>& beta,
                     std::vector<double>& gamma, std::vector<double>& varsigma,
                     const std::vector<PolynomialTerm>& terms) {
  (void)model;
  for (const auto& t : terms) {
    alpha.push_back(t.alpha);
    beta.push_back(t.beta);
    gamma.push_back(std::abs(t.cubic));
    varsigma.push_back(0.0);
  }
}

std::vector<double> cubic_list(const std::vector<PolynomialTerm>& terms) {
  std::vector<double> c;
  for (const auto& t : terms) c.push_back(t.cubic);
  return c;
}

}  // namespace

LatticeModel build_model(const PotentialSpec& spec, double trunc_tol) {
  if (!(trunc_tol > 0.0)) throw SpecError("build_model: trunc_tol must be positive");

  LatticeModel model;
  model.family_ = spec.family();
  model.trunc_tol_ = trunc_tol;
  std::vector<PolynomialTerm> poly;

  if (const auto* p = std::get_if<ClassicalFputSpec>(&spec.payload)) {
    poly = {{p->alpha1, p->beta1, p->cubic1}};
  } else if (const auto* p = std::get_if<FiniteRangeSpec>(&spec.payload)) {
    if (p->terms.empty()) throw SpecError("finite-range potential needs at least one term");
    poly = p->terms;
  } else if (const auto* p = std::get_if<NnnSpec>(&spec.payload)) {
    if (p->beta1 + 8.0 * p->beta2 == 0.0) {
      throw DegeneracyError("degenerate quadratic coefficient: beta1 = -8 beta2 gives b = 0");
    }
    poly = {{1.0, p->beta1, p->cubic1}, {p->g, p->beta2, p->cubic2}};
  } else if (const auto* p = std::get_if<CustomCoefficientsSpec>(&spec.payload)) {
    if (p->alpha.empty()) throw SpecError("custom coefficients need a non-empty alpha sequence");
    const std::size_t n = p->alpha.size();
    if (p->beta.size() > n || p->gamma.size() > n || p->varsigma.size() > n) {
      throw SpecError("custom coefficient sequences longer than alpha");
    }
    for (std::size_t i = 0; i < n; ++i) {
      poly.push_back({p->alpha[i], i < p->beta.size() ? p->beta[i] : 0.0,
                      i < p->gamma.size() ? p->gamma[i] : 0.0});
    }
  }

  if (const auto* p = std::get_if<CalogeroMoserSpec>(&spec.payload)) {
    const double a = p->a;
    if (!(a > 3.0) || !std::isfinite(a)) {
      std::ostringstream os;
      os << "Calogero-Moser exponent a = " << a
         << " must exceed 3 (sum alpha_m m^2 or sum |beta_m| m^5 diverges)";
      throw SpecError(os.str());
    }
    const double ds = spec.delta_star.value_or(0.5);
    if (!(ds > 0.0 && ds < 1.0)) throw SpecError("Calogero-Moser delta_star must lie in (0, 1)");
    const auto c = cm_constants(a, ds);
    // Tails are sum_{m>M} m^{-a} times these constants.
    const std::int64_t M = std::max({range_for_tail(c.alpha_c, a, trunc_tol),
                                     range_for_tail(std::abs(c.beta_c), a, trunc_tol),
                                     range_for_tail(c.gamma_c, a, trunc_tol)});
    if (M > kMaxRange) {
      throw SpecError("truncation tolerance unreachable: range would exceed " +
                      std::to_string(kMaxRange));
    }
    model.range_ = static_cast<int>(M);
    model.r_star_ = 1.0;
    model.delta_star_ = ds;
    model.cm_exponent_ = a;
    model.alpha_.resize(M);
    model.beta_.resize(M);
    model.gamma_.resize(M);
    model.varsigma_.resize(M);
    for (std::int64_t m = 1; m <= M; ++m) {
      const double mm = static_cast<double>(m);
      model.alpha_[m - 1] = c.alpha_c * std::pow(mm, -a - 2.0);
      model.beta_[m - 1] = c.beta_c * std::pow(mm, -a - 3.0);
      model.gamma_[m - 1] = c.gamma_c * std::pow(mm, -a - 4.0);
      model.varsigma_[m - 1] = -a * std::pow(mm, -a - 1.0);
    }
    model.tails_.alpha_m2 = c.alpha_c * zeta_tail_bound(a, M);
    model.tails_.beta_m3 = std::abs(c.beta_c) * zeta_tail_bound(a, M);
    model.tails_.beta_m5 = std::abs(c.beta_c) * zeta_tail_bound(a - 2.0, M);
    model.tails_.gamma_m4 = c.gamma_c * zeta_tail_bound(a, M);
    model.remainder_ = std::make_shared<CalogeroMoserRemainder>(a);
  } else {
    const double ds = spec.delta_star.value_or(1.0);
    if (!(ds > 0.0)) throw SpecError("delta_star must be positive");
    model.delta_star_ = ds;
    model.r_star_ = 0.0;
    fill_polynomial(model, model.alpha_, model.beta_, model.gamma_, model.varsigma_, poly);
    if (const auto* p = std::get_if<CustomCoefficientsSpec>(&spec.payload)) {
      for (std::size_t i = 0; i < p->varsigma.size(); ++i) model.varsigma_[i] = p->varsigma[i];
    }
    model.range_ = static_cast<int>(poly.size());
    model.remainder_ = spec.remainder_override
                           ? spec.remainder_override
                           : std::make_shared<PolynomialRemainder>(cubic_list(poly));
  }

  double b = 0.0;
  for (int m = model.range_; m >= 1; --m) b += model.beta_[m - 1] * std::pow(double(m), 3.0);
  if (b == 0.0 && !model.cm_exponent_) {
    throw DegeneracyError("degenerate quadratic coefficient: b = sum beta_m m^3 = 0");
  }
  return model;
}

double psi_prime(const LatticeModel& model, int m, double eta) {
  if (m < 1 || m > model.range()) throw DomainError("psi_prime: m outside 1..M");
  if (std::abs(eta) > m * model.delta_star()) {
    std::ostringstream os;
    os << "psi_prime: |eta| = " << std::abs(eta) << " exceeds m*delta_star = "
       << m * model.delta_star() << " for m = " << m;
    throw DomainError(os.str());
  }
  return model.remainder().psi_prime(m, eta);
}

double psi_second(const LatticeModel& model, int m, double eta) {
  if (m < 1 || m > model.range()) throw DomainError("psi_second: m outside 1..M");
  if (std::abs(eta) > m * model.delta_star()) {
    throw DomainError("psi_second: |eta| exceeds m*delta_star for m = " + std::to_string(m));
  }
  return model.remainder().psi_second(m, eta);
}

BCoefficient b_coefficient(const LatticeModel& model) {
  BCoefficient out;
  out.value = model.beta_moment(3.0);
  out.tail_bound = model.tails().beta_m3;
  if (!(std::abs(out.value) > out.tail_bound) || out.value == 0.0) {
    std::ostringstream os;
    os << "degenerate quadratic coefficient: |b| = " << std::abs(out.value)
       << " does not exceed the truncation bound " << out.tail_bound;
    throw DegeneracyError(os.str());
  }
  return out;
}

AssumptionReport check_assumptions(const LatticeModel& model) {
  AssumptionReport r;
  const auto& t = model.tails();
  r.sum_abs_beta_m5 = model.abs_beta_moment(5.0);
  r.sum_abs_beta_m5_tail = t.beta_m5;
  r.sum_gamma_m4 = model.gamma_moment(4.0);
  r.sum_gamma_m4_tail = t.gamma_m4;
  r.beta_m5_finite = std::isfinite(r.sum_abs_beta_m5) && std::isfinite(t.beta_m5);
  r.gamma_m4_finite = std::isfinite(r.sum_gamma_m4) && std::isfinite(t.gamma_m4);
  r.b = model.beta_moment(3.0);
  r.b_tail_bound = t.beta_m3;
  r.b_certified = std::abs(r.b) > r.b_tail_bound && r.b != 0.0;
  const double tol = model.trunc_tol();
  r.tails_within_tolerance = t.alpha_m2 < tol && t.beta_m3 < tol && t.gamma_m4 < tol;
  r.pass = r.beta_m5_finite && r.gamma_m4_finite && r.b_certified && r.tails_within_tolerance;
  return r;
}

}  // namespace lrfput
