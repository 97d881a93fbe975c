#pragma once

// Uniform periodic grid on [-L, L), real FFTs, Fourier multipliers and
// Sobolev norms.
//
// Transform convention: forward(F)_j = sum_n F(x_n) exp(-2 pi i j n / N),
// inverse divides by N. Spectra hold the N/2+1 non-negative modes. Because
// x_0 = -L, the coefficient of exp(i k_j x) is (-1)^j times the stored one;
// true_phase() applies that factor.

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lrfput {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

class Grid {
 public:
  /// Throws SpecError unless N is a power of two >= 256 and L >= 20.
  Grid(double L, int N);
  /// No size restrictions beyond N even and L > 0; for tests and tooling.
  static Grid unchecked(double L, int N);

  double L() const { return L_; }
  int N() const { return N_; }
  double dx() const { return 2.0 * L_ / N_; }
  int modes() const { return N_ / 2 + 1; }
  /// k_j = pi j / L.
  double k(int j) const { return kPi * j / L_; }
  /// x_n = -L + n dx.
  double x(int n) const { return -L_ + n * dx(); }
  /// Index of -x_n.
  int mirror(int n) const { return (N_ - n) % N_; }
  std::vector<double> wavenumbers() const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.L_ == b.L_ && a.N_ == b.N_; }

 private:
  Grid() = default;
  static constexpr double kPi = 3.14159265358979323846;
  double L_ = 0.0;
  int N_ = 0;
};

/// Real grid function.
class Field {
 public:
  explicit Field(const Grid& grid) : grid_(grid), values_(grid.N(), 0.0) {}
  Field(const Grid& grid, std::vector<double> values);
  static Field sample(const Grid& grid, const std::function<double(double)>& f);

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.N(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](int n) const { return values_[n]; }
  double& operator[](int n) { return values_[n]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// this += s * o.
  Field& axpy(double s, const Field& o);

  /// max_n |F(x_n) - F(-x_n)|.
  double parity_defect() const;
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// ---------------------------------------------------------------------------
// Raw transforms (any even n). Plans are cached per size and shared across
// threads; execution is reentrant.
// ---------------------------------------------------------------------------

/// out has n/2+1 entries.
void fft_forward(std::span<const double> in, std::span<Complex> out);
/// in has n/2+1 entries, out has n entries; includes the 1/n factor.
void fft_inverse(std::span<const Complex> in, std::span<double> out);

Spectrum forward(const Field& F);
Field inverse(const Spectrum& spec, const Grid& grid);

/// Stored coefficients rotated to the phase of exp(i k_j x).
Spectrum true_phase(const Spectrum& spec);

// ---------------------------------------------------------------------------
// Multipliers and norms
// ---------------------------------------------------------------------------

/// Symbol values at k_j, j = 0..N/2.
std::vector<double> sample_symbol(const Grid& grid, const std::function<double(double)>& m);

/// Multiplies the spectrum by the symbol in place.
/// Throws SingularMultiplierError if a symbol value is not finite.
void apply_symbol(Spectrum& spec, std::span<const double> symbol);

Field apply_multiplier(const Field& F, const std::function<double(double)>& m);
Field apply_multiplier(const Field& F, std::span<const double> symbol);

/// ||F||_{H^s} with the unitary discrete convention
///   ||F||^2 = (dx / N) sum_{j full} (1 + k_j^2)^s |F^_j|^2,
/// so ||F||_{H^0} equals (dx sum_n F_n^2)^{1/2}. Requires s >= -2.
double sobolev_norm(const Field& F, double s);
double sobolev_norm(const Spectrum& spec, const Grid& grid, double s);
/// H^s inner product in the same convention.
double sobolev_inner(const Field& F, const Field& G, double s);
/// dx sum_n F_n G_n.
double l2_inner(const Field& F, const Field& G);

/// (F(x) + F(-x)) / 2 on the grid.
Field project_even(const Field& F);
void project_even_inplace(std::vector<double>& values);

/// Spectral derivative of order `order`.
Field derivative(const Field& F, int order);

/// Evaluates the trigonometric interpolant of F at arbitrary x.
/// The Nyquist mode is split symmetrically so real data stays real.
class FourierInterpolant {
 public:
  explicit FourierInterpolant(const Field& F);
  double value(double x) const;
  /// Periodic antiderivative of F - mean(F), normalised to vanish at x = -L.
  double antiderivative_periodic(double x) const;
  double mean() const { return mean_; }

 private:
  double L_;
  int N_;
  double mean_;
  Spectrum coeff_;  // true-phase, divided by N
};

// ---------------------------------------------------------------------------
// Dealiased products
// ---------------------------------------------------------------------------

/// Moves spectra to a 3N/2-point grid and back so that quadratic products
/// are free of aliasing. The Nyquist mode is dropped on the way up.
class Dealiaser {
 public:
  explicit Dealiaser(const Grid& grid, bool enabled = true);
  bool enabled() const { return enabled_; }
  int padded_size() const { return Np_; }
  /// Physical values on the padded grid of the function with spectrum `spec`
  /// (N/2+1 modes). `scratch` must hold Np/2+1 entries.
  void to_physical(std::span<const Complex> spec, std::span<double> out,
                   std::span<Complex> scratch) const;
  /// Spectrum (N/2+1 modes) of padded physical values, truncated.
  void to_spectrum(std::span<const double> values, std::span<Complex> out,
                   std::span<Complex> scratch) const;
  /// Spectrum of the pointwise product F G.
  Spectrum product(const Spectrum& a, const Spectrum& b) const;

 private:
  int N_;
  int Np_;
  bool enabled_;
};

Field dealiased_product(const Field& F, const Field& G, bool dealias = true);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Columns x,value.
void write_field_csv(std::ostream& os, const Field& F, const std::string& header = "x,value");
/// Columns k,re,im of the true-phase spectrum scaled by dx.
void write_spectrum_csv(std::ostream& os, const Field& F);

}  // namespace lrfput
