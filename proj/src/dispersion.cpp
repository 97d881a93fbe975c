#include "lrfput/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <tuple>

#include "lrfput/errors.hpp"
#include "lrfput/special_functions.hpp"

namespace lrfput {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Small-K extension: sum until m K >= kExtend.
constexpr double kExtend = 64.0;
constexpr std::int64_t kMaxExtendedRange = 4'000'000;
constexpr int kResync = 128;

// sinc^2(z/2) - 1 and sinc^2(z/2) - 1 + z^2/12 from s = sin(z/2).
inline void sinc_terms(double z, double s, double& g1, double& g2) {
  if (z < 2.0) {
    g1 = sinc_sq_half_minus_one(z);
    g2 = sinc_sq_half_second_remainder(z);
    return;
  }
  const double q = 2.0 * s / z;
  g1 = q * q - 1.0;
  g2 = g1 + z * z / 12.0;
}

}  // namespace

double theta(std::span<const double> alpha, double k) {
  double sum = 0.0;
  for (std::size_t i = alpha.size(); i-- > 0;) {
    const double s = std::sin(0.5 * static_cast<double>(i + 1) * k);
    sum += 4.0 * alpha[i] * s * s;
  }
  return sum;
}

double theta(const LatticeModel& model, double k) { return theta(model.alphas(), k); }

double theta_cm4_closed_form(double k) {
  const double q = std::remainder(k, 2.0 * kPi);
  const double q2 = q * q;
  const double q4 = q2 * q2;
  const double pi2 = kPi * kPi;
  return 2.0 / 9.0 * pi2 * pi2 * q2 - 5.0 / 18.0 * pi2 * q4 + kPi * std::abs(q) * q4 / 6.0 -
         q4 * q2 / 36.0;
}

double c0_sq(const LatticeModel& model) {
  if (auto a = model.cm_exponent()) return *a * (*a + 1.0) * zeta(*a);
  return model.alpha_moment(2.0);
}

double lambda_dd0(const LatticeModel& model) {
  if (auto a = model.cm_exponent()) return -*a * (*a + 1.0) * zeta(*a - 2.0) / 6.0;
  return -model.alpha_moment(4.0) / 6.0;
}

double lambda(const LatticeModel& model, double k) { return Dispersion(model).lambda(k); }

double lambda_dd0_finite_difference(const LatticeModel& model, double h) {
  const Dispersion d(model);
  return (d.lambda(h) - 2.0 * d.lambda(0.0) + d.lambda(-h)) / (h * h);
}

// ---------------------------------------------------------------------------
// Dispersion evaluator
// ---------------------------------------------------------------------------

Dispersion::Dispersion(const LatticeModel& model)
    : model_(&model),
      c0_sq_(lrfput::c0_sq(model)),
      lambda_dd0_(lrfput::lambda_dd0(model)),
      base_range_(model.range()),
      max_range_(model.range()),
      cm_a_(model.cm_exponent()) {
  if (cm_a_) {
    const double a = *cm_a_;
    const double C = a * (a + 1.0);
    // Least M with C sum_{m>M} m^{-a} below the tolerance.
    std::int64_t M = static_cast<std::int64_t>(
        std::ceil(std::pow(C / ((a - 1.0) * model.trunc_tol()), 1.0 / (a - 1.0))));
    M = std::clamp<std::int64_t>(M, 16, model.range());
    base_range_ = static_cast<int>(M);
    max_range_ = kMaxExtendedRange;
  }
}

double Dispersion::alpha(std::int64_t m) const {
  if (m <= model_->range()) return model_->alpha(static_cast<int>(m));
  const double a = *cm_a_;
  return a * (a + 1.0) * std::pow(static_cast<double>(m), -a - 2.0);
}

std::pair<double, double> Dispersion::remainders(double K) const {
  K = std::abs(K);
  if (K == 0.0) return {0.0, 0.0};
  std::int64_t M = base_range_;
  if (cm_a_) {
    const double want = std::ceil(kExtend / K);
    if (want > static_cast<double>(M)) {
      M = want >= static_cast<double>(max_range_) ? max_range_ : static_cast<std::int64_t>(want);
    }
  }
  const std::complex<double> step = std::polar(1.0, 0.5 * K);
  std::complex<double> w = step;
  double t1 = 0.0, t2 = 0.0;
  for (std::int64_t m = 1; m <= M; ++m) {
    if (m % kResync == 0) w = std::polar(1.0, 0.5 * K * static_cast<double>(m));
    const double z = K * static_cast<double>(m);
    double g1, g2;
    sinc_terms(z, w.imag(), g1, g2);
    const double am2 = alpha(m) * static_cast<double>(m) * static_cast<double>(m);
    t1 += am2 * g1;
    t2 += am2 * g2;
    w *= step;
  }
  if (cm_a_) {
    // For m > M, sinc^2(mK/2) is replaced by its mean 2 / (mK)^2.
    const double a = *cm_a_;
    const double C = a * (a + 1.0);
    const double tail2 = C * zeta_tail(a, M);
    const double tail4 = C * zeta_tail(a - 2.0, M);
    const double mean = 2.0 * C * zeta_tail(a + 2.0, M) / (K * K);
    t1 += mean - tail2;
    t2 += mean - tail2 + K * K / 12.0 * tail4;
  }
  return {t1, t2};
}

double Dispersion::lambda(double K) const {
  if (std::abs(K) < 1.0) return c0_sq_ + T1(K);
  return theta(*model_, K) / (K * K);
}

double Dispersion::T1(double K) const { return remainders(K).first; }
double Dispersion::T2(double K) const { return remainders(K).second; }

std::vector<double> Dispersion::T1(std::span<const double> K) const {
  std::vector<double> out(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) out[i] = remainders(K[i]).first;
  return out;
}

std::vector<double> Dispersion::T2(std::span<const double> K) const {
  std::vector<double> out(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) out[i] = remainders(K[i]).second;
  return out;
}

std::pair<std::vector<double>, std::vector<double>> Dispersion::remainders(
    std::span<const double> K) const {
  std::pair<std::vector<double>, std::vector<double>> out;
  out.first.resize(K.size());
  out.second.resize(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    std::tie(out.first[i], out.second[i]) = remainders(K[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inverse problem
// ---------------------------------------------------------------------------

std::vector<double> coefficients_from_theta(std::span<const double> samples, int M_out, double tol) {
  const std::size_t n = samples.size();
  if (M_out < 1) throw SpecError("coefficients_from_theta: M_out must be positive");
  if (n < 2 * static_cast<std::size_t>(M_out) + 2) {
    throw SpecError("coefficients_from_theta: need at least 2 M_out + 2 samples, got " +
                    std::to_string(n));
  }
  double scale = 1.0;
  for (double v : samples) scale = std::max(scale, std::abs(v));
  if (std::abs(samples[0]) > tol * scale) {
    std::ostringstream os;
    os << "invalid target: theta(0) = " << samples[0] << " is not zero";
    throw DomainError(os.str());
  }
  std::vector<double> alpha(M_out);
  for (int m = 1; m <= M_out; ++m) {
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t phase = (static_cast<std::size_t>(m) * i) % n;
      b += samples[i] * std::cos(2.0 * kPi * static_cast<double>(phase) / static_cast<double>(n));
    }
    b *= 2.0 / static_cast<double>(n);
    alpha[m - 1] = -0.5 * b;
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Type I certification
// ---------------------------------------------------------------------------

SigmaEstimate estimate_sigma(const LatticeModel& model, double k_lo, double k_hi, int n_points) {
  if (!(k_lo > 0.0 && k_hi > k_lo) || n_points < 20) {
    throw SpecError("estimate_sigma: need 0 < k_lo < k_hi and at least 20 points");
  }
  const Dispersion d(model);
  std::vector<double> lx, ly;
  double max_abs = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double k = k_lo * std::pow(k_hi / k_lo, static_cast<double>(i) / (n_points - 1));
    const double t = std::abs(d.T2(k));
    max_abs = std::max(max_abs, t);
    if (t > 0.0) {
      lx.push_back(std::log(k));
      ly.push_back(std::log(t));
    }
  }
  SigmaEstimate est;
  if (max_abs < 1e-14 || lx.size() < 2) {
    est.sigma = 2.0;
    est.analytic = true;
    est.note = "analytic: T2 below 1e-14 on the fit range";
    return est;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  est.sigma = std::clamp(est.slope - 2.0, std::numeric_limits<double>::min(), 2.0);
  if (est.slope - 2.0 > 2.0) est.note = "clamped to 2";
  return est;
}

DispersionProfile certify_type1(const LatticeModel& model, const Type1Grid& grid) {
  if (grid.n_samples < 2048) throw SpecError("certify_type1: n_samples must be >= 2048");
  if (!(grid.k_max >= 4.0 * kPi - 1e-12)) throw SpecError("certify_type1: k_max must be >= 4 pi");

  DispersionProfile p;
  p.family = model.family();
  p.k_max = grid.k_max;
  p.n_samples = grid.n_samples;
  const Dispersion d(model);
  p.c0_sq = d.c0_sq();
  p.lambda_dd0 = d.lambda_dd0();

  std::vector<double> k(grid.n_samples);
  for (int i = 0; i < grid.n_samples; ++i) k[i] = grid.k_max * i / (grid.n_samples - 1.0);
  const auto [t1, t2] = d.remainders(k);

  // Sums of the positive and negative coefficients, tails included.
  double pos = 0.0, neg = 0.0;
  for (double a : model.alphas()) (a > 0 ? pos : neg) += a;
  if (auto a = model.cm_exponent()) pos = *a * (*a + 1.0) * zeta(*a + 2.0);

  // (i) theta >= 4 sum alpha^- gives lambda >= 4 sum alpha^- / k^2 beyond k_max.
  double lower = std::numeric_limits<double>::infinity();
  for (double v : t1) lower = std::min(lower, p.c0_sq + v);
  lower = std::min(lower, 4.0 * neg / (grid.k_max * grid.k_max));
  p.lambda_lower = lower;
  p.bounded_below = std::isfinite(lower);

  // (ii)
  p.concave_at_zero = p.lambda_dd0 < 0.0;

  const SigmaEstimate se = estimate_sigma(model);
  p.sigma_fit = se.sigma;
  p.sigma = std::floor(se.sigma * 100.0 + 1e-9) / 100.0;
  if (p.sigma <= 0.0) p.sigma = 0.01;
  if (!se.note.empty()) p.notes.push_back("sigma fit: " + se.note);

  // Log-spaced points near 0 complement the uniform grid for (iii).
  std::vector<double> k_near;
  for (int i = 0; i < 48; ++i) k_near.push_back(1e-4 * std::pow(2.0e4, i / 47.0));
  const auto [t1_near, t2_near] = d.remainders(k_near);

  const double envelope = 4.0 * pos / (grid.k_max * grid.k_max);
  bool found = false;
  for (double ks : {0.5, 1.0, 1.5, 2.0}) {
    double upper_fit = 0.0;  // max |T2| / k^{2+sigma}
    double lower_gap = std::numeric_limits<double>::infinity();  // min -T1 / k^2
    auto visit = [&](double kk, double a1, double a2) {
      if (kk <= 0.0 || kk > ks) return;
      upper_fit = std::max(upper_fit, std::abs(a2) / std::pow(kk, 2.0 + p.sigma));
      lower_gap = std::min(lower_gap, -a1 / (kk * kk));
    };
    for (std::size_t i = 0; i < k.size(); ++i) visit(k[i], t1[i], t2[i]);
    for (std::size_t i = 0; i < k_near.size(); ++i) visit(k_near[i], t1_near[i], t2_near[i]);
    const double mu = std::max(1.2 * upper_fit, std::numeric_limits<double>::min());
    const bool iii = p.concave_at_zero && mu <= lower_gap;

    double sup = envelope;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] >= ks) sup = std::max(sup, p.c0_sq + t1[i]);
    }
    const bool iv = sup < p.c0_sq;
    if (!found || (iii && iv)) {
      p.k_star = ks;
      p.mu_star = mu;
      p.sup_outside = sup;
      p.local_bounds = iii;
      p.subsonic_outside = iv;
    }
    found = true;
    if (iii && iv) break;
  }
  p.type1_certified = p.bounded_below && p.concave_at_zero && p.local_bounds && p.subsonic_outside;
  p.notes.push_back(
      "grid certification: inequalities hold at the sampled wavenumbers; oscillation between "
      "samples is not excluded");
  return p;
}

}  // namespace lrfput
