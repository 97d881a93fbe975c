#include "lrfput/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "lrfput/errors.hpp"

namespace lrfput {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(n, real, cplx, flags);
    p.c2r = fftw_plan_dft_c2r_1d(n, cplx, real, flags);
    fftw_free(real);
    fftw_free(cplx);
    if (!p.r2c || !p.c2r) throw Error("FFTW failed to plan size " + std::to_string(n));
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

std::vector<Complex>& c2r_scratch(std::size_t n) {
  thread_local std::vector<Complex> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid / Field
// ---------------------------------------------------------------------------

Grid::Grid(double L, int N) : L_(L), N_(N) {
  if (!is_power_of_two(N) || N < 256) {
    throw SpecError("grid: N must be a power of two >= 256, got " + std::to_string(N));
  }
  if (!(L >= 20.0) || !std::isfinite(L)) {
    throw SpecError("grid: L must be >= 20, got " + std::to_string(L));
  }
}

Grid Grid::unchecked(double L, int N) {
  if (N < 2 || N % 2 != 0 || !(L > 0.0)) throw SpecError("grid: need even N >= 2 and L > 0");
  Grid g;
  g.L_ = L;
  g.N_ = N;
  return g;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(modes());
  for (int j = 0; j < modes(); ++j) k[j] = this->k(j);
  return k;
}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid.N()) {
    throw SpecError("field: value count does not match the grid");
  }
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& f) {
  Field F(grid);
  for (int n = 0; n < grid.N(); ++n) F[n] = f(grid.x(n));
  return F;
}

Field& Field::operator+=(const Field& o) {
  for (int n = 0; n < size(); ++n) values_[n] += o.values_[n];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  for (int n = 0; n < size(); ++n) values_[n] -= o.values_[n];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& o) {
  for (int n = 0; n < size(); ++n) values_[n] += s * o.values_[n];
  return *this;
}

double Field::parity_defect() const {
  double d = 0.0;
  for (int n = 0; n < size(); ++n) d = std::max(d, std::abs(values_[n] - values_[grid_.mirror(n)]));
  return d;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

void fft_forward(std::span<const double> in, std::span<Complex> out) {
  const int n = static_cast<int>(in.size());
  if (static_cast<int>(out.size()) != n / 2 + 1) throw SpecError("fft_forward: output size");
  const PlanPair p = PlanCache::instance().get(n);
  // r2c does not modify its input.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void fft_inverse(std::span<const Complex> in, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  if (static_cast<int>(in.size()) != n / 2 + 1) throw SpecError("fft_inverse: input size");
  const PlanPair p = PlanCache::instance().get(n);
  auto& scratch = c2r_scratch(in.size());
  std::copy(in.begin(), in.end(), scratch.begin());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double inv = 1.0 / n;
  for (double& v : out) v *= inv;
}

Spectrum forward(const Field& F) {
  Spectrum s(F.grid().modes());
  fft_forward(F.values(), s);
  return s;
}

Field inverse(const Spectrum& spec, const Grid& grid) {
  Field F(grid);
  fft_inverse(spec, F.values());
  return F;
}

Spectrum true_phase(const Spectrum& spec) {
  Spectrum t(spec);
  for (std::size_t j = 1; j < t.size(); j += 2) t[j] = -t[j];
  return t;
}

// ---------------------------------------------------------------------------
// Multipliers and norms
// ---------------------------------------------------------------------------

std::vector<double> sample_symbol(const Grid& grid, const std::function<double(double)>& m) {
  std::vector<double> s(grid.modes());
  for (int j = 0; j < grid.modes(); ++j) s[j] = m(grid.k(j));
  return s;
}

void apply_symbol(Spectrum& spec, std::span<const double> symbol) {
  if (symbol.size() != spec.size()) throw SpecError("apply_symbol: symbol length mismatch");
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (!std::isfinite(symbol[j])) {
      throw SingularMultiplierError("multiplier is not finite at mode " + std::to_string(j));
    }
    spec[j] *= symbol[j];
  }
}

Field apply_multiplier(const Field& F, std::span<const double> symbol) {
  Spectrum s = forward(F);
  apply_symbol(s, symbol);
  return inverse(s, F.grid());
}

Field apply_multiplier(const Field& F, const std::function<double(double)>& m) {
  return apply_multiplier(F, sample_symbol(F.grid(), m));
}

double sobolev_norm(const Spectrum& spec, const Grid& grid, double s) {
  if (!(s >= -2.0)) throw DomainError("sobolev_norm: s must be >= -2");
  const int half = grid.N() / 2;
  double sum = 0.0;
  for (int j = half; j >= 0; --j) {
    const double w = (j == 0 || j == half) ? 1.0 : 2.0;
    const double k = grid.k(j);
    sum += w * std::pow(1.0 + k * k, s) * std::norm(spec[j]);
  }
  return std::sqrt(sum * grid.dx() / grid.N());
}

double sobolev_norm(const Field& F, double s) { return sobolev_norm(forward(F), F.grid(), s); }

double sobolev_inner(const Field& F, const Field& G, double s) {
  const Spectrum a = forward(F);
  const Spectrum b = forward(G);
  const Grid& grid = F.grid();
  const int half = grid.N() / 2;
  double sum = 0.0;
  for (int j = half; j >= 0; --j) {
    const double w = (j == 0 || j == half) ? 1.0 : 2.0;
    const double k = grid.k(j);
    sum += w * std::pow(1.0 + k * k, s) * std::real(a[j] * std::conj(b[j]));
  }
  return sum * grid.dx() / grid.N();
}

double l2_inner(const Field& F, const Field& G) {
  double sum = 0.0;
  for (int n = 0; n < F.size(); ++n) sum += F[n] * G[n];
  return sum * F.grid().dx();
}

void project_even_inplace(std::vector<double>& v) {
  const int N = static_cast<int>(v.size());
  for (int n = 1; n < N / 2; ++n) {
    const double avg = 0.5 * (v[n] + v[N - n]);
    v[n] = avg;
    v[N - n] = avg;
  }
}

Field project_even(const Field& F) {
  Field E(F);
  project_even_inplace(E.data());
  return E;
}

Field derivative(const Field& F, int order) {
  Spectrum s = forward(F);
  const Grid& g = F.grid();
  const int half = g.N() / 2;
  for (int j = 0; j <= half; ++j) {
    Complex factor = std::pow(Complex(0.0, g.k(j)), order);
    // The Nyquist mode of a real grid function has no odd derivative.
    if (j == half && order % 2 != 0) factor = 0.0;
    s[j] *= factor;
  }
  return inverse(s, g);
}

FourierInterpolant::FourierInterpolant(const Field& F)
    : L_(F.grid().L()), N_(F.grid().N()), coeff_(true_phase(forward(F))) {
  for (auto& c : coeff_) c /= static_cast<double>(N_);
  mean_ = coeff_[0].real();
}

double FourierInterpolant::value(double x) const {
  const int half = N_ / 2;
  double sum = coeff_[0].real();
  for (int j = half - 1; j >= 1; --j) {
    const double k = kPi * j / L_;
    sum += 2.0 * std::real(coeff_[j] * std::polar(1.0, k * x));
  }
  sum += coeff_[half].real() * std::cos(kPi * half / L_ * x);
  return sum;
}

double FourierInterpolant::antiderivative_periodic(double x) const {
  const int half = N_ / 2;
  auto raw = [&](double y) {
    double sum = 0.0;
    for (int j = half - 1; j >= 1; --j) {
      const double k = kPi * j / L_;
      sum += 2.0 * std::real(coeff_[j] * std::polar(1.0, k * y) / Complex(0.0, k));
    }
    const double kn = kPi * half / L_;
    sum += coeff_[half].real() * std::sin(kn * y) / kn;
    return sum;
  };
  return raw(x) - raw(-L_);
}

// ---------------------------------------------------------------------------
// Dealiasing
// ---------------------------------------------------------------------------

Dealiaser::Dealiaser(const Grid& grid, bool enabled)
    : N_(grid.N()), Np_(enabled ? 3 * grid.N() / 2 : grid.N()), enabled_(enabled) {}

void Dealiaser::to_physical(std::span<const Complex> spec, std::span<double> out,
                            std::span<Complex> scratch) const {
  const int half = N_ / 2;
  if (!enabled_) {
    fft_inverse(spec, out);
    return;
  }
  const double scale = static_cast<double>(Np_) / N_;
  for (int j = 0; j < half; ++j) scratch[j] = spec[j] * scale;
  std::fill(scratch.begin() + half, scratch.begin() + (Np_ / 2 + 1), Complex(0.0));
  fft_inverse(scratch.first(Np_ / 2 + 1), out);
}

void Dealiaser::to_spectrum(std::span<const double> values, std::span<Complex> out,
                            std::span<Complex> scratch) const {
  const int half = N_ / 2;
  if (!enabled_) {
    fft_forward(values, out);
    return;
  }
  fft_forward(values, scratch.first(Np_ / 2 + 1));
  const double scale = static_cast<double>(N_) / Np_;
  for (int j = 0; j < half; ++j) out[j] = scratch[j] * scale;
  out[half] = 0.0;
}

Spectrum Dealiaser::product(const Spectrum& a, const Spectrum& b) const {
  std::vector<double> pa(Np_), pb(Np_);
  std::vector<Complex> scratch(Np_ / 2 + 1);
  to_physical(a, pa, scratch);
  to_physical(b, pb, scratch);
  for (int n = 0; n < Np_; ++n) pa[n] *= pb[n];
  Spectrum out(N_ / 2 + 1);
  to_spectrum(pa, out, scratch);
  return out;
}

Field dealiased_product(const Field& F, const Field& G, bool dealias) {
  Dealiaser d(F.grid(), dealias);
  return inverse(d.product(forward(F), forward(G)), F.grid());
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& os, const Field& F, const std::string& header) {
  os << header << '\n';
  const auto old = os.precision(17);
  for (int n = 0; n < F.size(); ++n) os << F.grid().x(n) << ',' << F[n] << '\n';
  os.precision(old);
}

void write_spectrum_csv(std::ostream& os, const Field& F) {
  const Spectrum s = true_phase(forward(F));
  const double dx = F.grid().dx();
  os << "k,re,im\n";
  const auto old = os.precision(17);
  for (int j = 0; j < F.grid().modes(); ++j) {
    os << F.grid().k(j) << ',' << s[j].real() * dx << ',' << s[j].imag() * dx << '\n';
  }
  os.precision(old);
}

}  // namespace lrfput
