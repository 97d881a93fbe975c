#include "lrfput/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrfput/errors.hpp"
#include "lrfput/special_functions.hpp"

namespace lrfput {

namespace {
// Cached padded averages of W0 are kept below this many doubles.
constexpr std::size_t kAveragesCacheLimit = 8'000'000;
}  // namespace

Field averaging(double h, const Field& F) {
  if (!(h >= 0.0)) throw DomainError("averaging: h must be >= 0");
  if (h == 0.0) return F;
  return apply_multiplier(F, [h](double k) { return sinc(0.5 * h * k); });
}

double theta_symbol(double h, double k) { return sinc_half_minus_one_over_sq(h * k); }

Field theta_op(double h, const Field& F) {
  if (!(h > 0.0)) throw DomainError("theta_op: h must be > 0");
  return apply_multiplier(F, [h](double k) { return theta_symbol(h, k); });
}

OperatorContext::OperatorContext(std::shared_ptr<const LatticeModel> model,
                                 DispersionProfile profile, Grid grid, double eps, double sigma,
                                 bool dealias)
    : model_(std::move(model)),
      profile_(std::move(profile)),
      grid_(grid),
      eps_(eps),
      sigma_(sigma),
      dealias_(dealias),
      dealiaser_(grid, dealias),
      modes_(grid.modes()),
      W0_(grid) {
  build();
}

OperatorContext::OperatorContext(const LatticeModel& model, const DispersionProfile& profile,
                                 const Grid& grid, double eps, double sigma, bool dealias)
    : OperatorContext(std::make_shared<const LatticeModel>(model), profile, grid, eps, sigma,
                      dealias) {}

void OperatorContext::build() {
  if (!(eps_ >= 0.0) || !std::isfinite(eps_)) throw SpecError("operator context: eps must be >= 0");
  if (!(sigma_ > 0.0 && sigma_ <= 2.0)) throw SpecError("operator context: sigma must lie in (0, 2]");

  const Dispersion disp(*model_);
  c0_sq_ = disp.c0_sq();
  lambda_dd0_ = disp.lambda_dd0();
  if (!(lambda_dd0_ < 0.0)) {
    throw CertificationError("lambda''(0) >= 0: the lattice is not of Type I (wrong type)");
  }
  if (eps_ > 0.0 && !profile_.type1_certified) {
    throw CertificationError("Type I certificate missing or failed for this model");
  }
  b_ = b_coefficient(*model_).value;

  const std::vector<double> k = grid_.wavenumbers();
  const double half_neg = -0.5 * lambda_dd0_;
  B0_.resize(modes_);
  B0_inv_.resize(modes_);
  for (int j = 0; j < modes_; ++j) {
    B0_[j] = half_neg * (1.0 + k[j] * k[j]);
    B0_inv_[j] = 1.0 / B0_[j];
  }
  if (eps_ == 0.0) {
    B_ = B0_;
    B_inv_ = B0_inv_;
    B_minus_B0_.assign(modes_, 0.0);
    B_inv_minus_B0_inv_.assign(modes_, 0.0);
  } else {
    std::vector<double> K(modes_);
    for (int j = 0; j < modes_; ++j) K[j] = eps_ * k[j];
    const auto [t1, t2] = disp.remainders(K);
    const double inv_e2 = 1.0 / (eps_ * eps_);
    B_.resize(modes_);
    B_inv_.resize(modes_);
    B_minus_B0_.resize(modes_);
    B_inv_minus_B0_inv_.resize(modes_);
    for (int j = 0; j < modes_; ++j) {
      B_[j] = -t1[j] * inv_e2 + half_neg;
      B_inv_[j] = 1.0 / B_[j];
      B_minus_B0_[j] = -t2[j] * inv_e2;
      B_inv_minus_B0_inv_[j] = t2[j] * inv_e2 / (B_[j] * B0_[j]);
    }
    const double floor = half_neg * (1.0 - 1e-6);
    const double bmin = B_symbol_min();
    if (bmin < floor) {
      std::ostringstream os;
      os << "B_eps multiplier " << bmin << " falls below |lambda''(0)|/2 = " << half_neg
         << " at eps = " << eps_ << ": lattice not Type I at this scale";
      throw CertificationError(os.str());
    }
  }

  if (eps_ > 0.0) {
    const double span = std::ceil(2.0 * grid_.L() / eps_);
    op_range_ = static_cast<int>(std::min<double>(model_->range(), span));
  }
  qcoef_.resize(op_range_);
  sinc_.resize(static_cast<std::size_t>(op_range_) * modes_);
  for (int m = 1; m <= op_range_; ++m) {
    const double mm = static_cast<double>(m);
    qcoef_[m - 1] = model_->beta(m) * mm * mm * mm;
    double* row = sinc_.data() + static_cast<std::size_t>(m - 1) * modes_;
    for (int j = 0; j < modes_; ++j) row[j] = sinc(0.5 * eps_ * mm * k[j]);
  }

  const double amp = W0_amplitude();
  W0_ = Field::sample(grid_, [amp](double x) {
    const double c = 1.0 / std::cosh(0.5 * x);
    return amp * c * c;
  });
  W0_hat_ = forward(W0_);

  const int Np = dealiaser_.padded_size();
  if (static_cast<std::size_t>(op_range_) * Np <= kAveragesCacheLimit) {
    AW0_.resize(static_cast<std::size_t>(op_range_) * Np);
    Spectrum a(modes_);
    std::vector<Complex> scratch(Np / 2 + 1);
    for (int m = 1; m <= op_range_; ++m) {
      const double* s = sinc_row(m);
      for (int j = 0; j < modes_; ++j) a[j] = W0_hat_[j] * s[j];
      dealiaser_.to_physical(a, std::span<double>(AW0_.data() + static_cast<std::size_t>(m - 1) * Np, Np),
                             scratch);
    }
  }
  if (eps_ > 0.0) P_W0_hat_ = P_hat(W0_hat_);
}

double OperatorContext::B_symbol_min() const { return *std::min_element(B_.begin(), B_.end()); }

double OperatorContext::B_upper_bound() const {
  if (eps_ == 0.0) return B0_.back();
  return (c0_sq_ - profile_.lambda_lower) / (eps_ * eps_) - 0.5 * lambda_dd0_;
}

Field OperatorContext::with_symbol(const Field& F, const std::vector<double>& symbol) const {
  Spectrum s = forward(F);
  apply_symbol(s, symbol);
  return inverse(s, grid_);
}

Field OperatorContext::B(const Field& F) const { return with_symbol(F, B_); }
Field OperatorContext::B_inv(const Field& F) const { return with_symbol(F, B_inv_); }
Field OperatorContext::B0(const Field& F) const { return with_symbol(F, B0_); }
Field OperatorContext::B0_inv(const Field& F) const { return with_symbol(F, B0_inv_); }
Field OperatorContext::B_minus_B0(const Field& F) const { return with_symbol(F, B_minus_B0_); }
Field OperatorContext::B_inv_minus_B0_inv(const Field& F) const {
  return with_symbol(F, B_inv_minus_B0_inv_);
}

Spectrum OperatorContext::Q_hat(const Spectrum& V, const Spectrum& W) const {
  if (eps_ == 0.0) {
    Spectrum p = dealiaser_.product(V, W);
    for (auto& c : p) c *= b_;
    return p;
  }
  const bool same = &V == &W;
  const int Np = dealiaser_.padded_size();
  std::vector<double> pa(Np), pb(Np);
  std::vector<Complex> scratch(Np / 2 + 1);
  Spectrum a(modes_), c(modes_), acc(modes_, Complex(0.0));
  for (int m = op_range_; m >= 1; --m) {
    const double* s = sinc_row(m);
    for (int j = 0; j < modes_; ++j) a[j] = V[j] * s[j];
    dealiaser_.to_physical(a, pa, scratch);
    if (same) {
      for (int n = 0; n < Np; ++n) pa[n] *= pa[n];
    } else {
      for (int j = 0; j < modes_; ++j) a[j] = W[j] * s[j];
      dealiaser_.to_physical(a, pb, scratch);
      for (int n = 0; n < Np; ++n) pa[n] *= pb[n];
    }
    dealiaser_.to_spectrum(pa, c, scratch);
    const double q = qcoef_[m - 1];
    for (int j = 0; j < modes_; ++j) acc[j] += (q * s[j]) * c[j];
  }
  return acc;
}

Spectrum OperatorContext::Q_W0_hat(const Spectrum& V) const {
  if (eps_ == 0.0 || AW0_.empty()) return Q_hat(W0_hat_, V);
  const int Np = dealiaser_.padded_size();
  std::vector<double> pa(Np);
  std::vector<Complex> scratch(Np / 2 + 1);
  Spectrum a(modes_), c(modes_), acc(modes_, Complex(0.0));
  for (int m = op_range_; m >= 1; --m) {
    const double* s = sinc_row(m);
    const double* w = AW0_.data() + static_cast<std::size_t>(m - 1) * Np;
    for (int j = 0; j < modes_; ++j) a[j] = V[j] * s[j];
    dealiaser_.to_physical(a, pa, scratch);
    for (int n = 0; n < Np; ++n) pa[n] = w[n] * pa[n];
    dealiaser_.to_spectrum(pa, c, scratch);
    const double q = qcoef_[m - 1];
    for (int j = 0; j < modes_; ++j) acc[j] += (q * s[j]) * c[j];
  }
  return acc;
}

Spectrum OperatorContext::P_hat(const Spectrum& W) const {
  Spectrum acc(modes_, Complex(0.0));
  if (eps_ == 0.0) return acc;
  const int Np = dealiaser_.padded_size();
  std::vector<double> pa(Np), out(Np);
  std::vector<Complex> scratch(Np / 2 + 1);
  Spectrum a(modes_), c(modes_);
  const double e2 = eps_ * eps_;
  const double delta = model_->delta_star();
  const Remainder& rem = model_->remainder();
  for (int m = op_range_; m >= 1; --m) {
    const double* s = sinc_row(m);
    for (int j = 0; j < modes_; ++j) a[j] = W[j] * s[j];
    dealiaser_.to_physical(a, pa, scratch);
    double amax = 0.0;
    for (double v : pa) amax = std::max(amax, std::abs(v));
    if (e2 * amax > delta) {
      std::ostringstream os;
      os << "P_eps: eps^2 |A W| = " << e2 * amax << " exceeds delta_star = " << delta
         << " for m = " << m;
      throw DomainError(os.str());
    }
    const double scale = static_cast<double>(m) * e2;
    for (int n = 0; n < Np; ++n) pa[n] *= scale;
    rem.psi_prime_many(m, pa, out);
    dealiaser_.to_spectrum(out, c, scratch);
    for (int j = 0; j < modes_; ++j) acc[j] += (static_cast<double>(m) * s[j]) * c[j];
  }
  const double inv = 1.0 / (e2 * e2 * e2);
  for (auto& v : acc) v *= inv;
  return acc;
}

Field OperatorContext::Q(const Field& V, const Field& W) const {
  const Spectrum v = forward(V);
  if (&V == &W) return inverse(Q_hat(v, v), grid_);
  return inverse(Q_hat(v, forward(W)), grid_);
}

Field OperatorContext::Q0(const Field& V, const Field& W) const {
  Spectrum p = dealiaser_.product(forward(V), forward(W));
  for (auto& c : p) c *= b_;
  return inverse(p, grid_);
}

Field OperatorContext::Q_W0(const Field& V) const { return inverse(Q_W0_hat(forward(V)), grid_); }

Field OperatorContext::P(const Field& W) const { return inverse(P_hat(forward(W)), grid_); }

Field OperatorContext::R() const {
  if (eps_ == 0.0) throw DomainError("R_eps requires eps > 0");
  Spectrum r = W0_hat_;
  apply_symbol(r, B_minus_B0_);
  const Spectrum q = Q_hat(W0_hat_, W0_hat_);
  const Spectrum q0 = dealiaser_.product(W0_hat_, W0_hat_);
  const double e2 = eps_ * eps_;
  const double scale = std::pow(eps_, -sigma_);
  for (int j = 0; j < modes_; ++j) {
    r[j] = scale * (-r[j] + (q[j] - b_ * q0[j]) + e2 * P_W0_hat_[j]);
  }
  return inverse(r, grid_);
}

Field OperatorContext::R_naive() const {
  if (eps_ == 0.0) throw DomainError("R_eps requires eps > 0");
  Spectrum r = W0_hat_;
  apply_symbol(r, B_);
  const Spectrum q = Q_hat(W0_hat_, W0_hat_);
  const double e2 = eps_ * eps_;
  const double scale = std::pow(eps_, -sigma_);
  for (int j = 0; j < modes_; ++j) r[j] = scale * (-r[j] + q[j] + e2 * P_W0_hat_[j]);
  return inverse(r, grid_);
}

Field OperatorContext::N(const Field& V) const {
  if (eps_ == 0.0) return Field(grid_);
  const double es = std::pow(eps_, sigma_);
  Spectrum w = forward(V);
  for (int j = 0; j < modes_; ++j) w[j] = W0_hat_[j] + es * w[j];
  Spectrum p = P_hat(w);
  const double inv = 1.0 / es;
  for (int j = 0; j < modes_; ++j) p[j] = (p[j] - P_W0_hat_[j]) * inv;
  return inverse(p, grid_);
}

Field OperatorContext::L(const Field& V) const {
  Spectrum q = Q_W0_hat(forward(V));
  for (int j = 0; j < modes_; ++j) q[j] *= -2.0 * B_inv_[j];
  Field out = inverse(q, grid_);
  out += V;
  return out;
}

Field OperatorContext::L0(const Field& V) const {
  Spectrum q = dealiaser_.product(W0_hat_, forward(V));
  for (int j = 0; j < modes_; ++j) q[j] *= -2.0 * b_ * B0_inv_[j];
  Field out = inverse(q, grid_);
  out += V;
  return out;
}

}  // namespace lrfput
