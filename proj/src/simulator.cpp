#include "lrfput/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrfput/dispersion.hpp"
#include "lrfput/errors.hpp"
#include "lrfput/special_functions.hpp"
#include "lrfput/spectral.hpp"

namespace lrfput {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double>& thread_buffer(int slot, std::size_t n) {
  thread_local std::vector<double> bufs[4];
  if (bufs[slot].size() < n) bufs[slot].resize(n);
  return bufs[slot];
}

// d extended by M_f sites past the seam.
void extend(const LatticeState& s, int Mf, std::vector<double>& ext) {
  std::copy(s.d.begin(), s.d.end(), ext.begin());
  for (int i = 0; i < Mf; ++i) ext[s.J + i] = s.d[i] + s.seam_jump;
}

}  // namespace

LatticeState LatticeState::flat(int J) {
  LatticeState s;
  s.J = J;
  s.d.assign(J, 0.0);
  s.v.assign(J, 0.0);
  return s;
}

std::vector<double> LatticeState::strain() const {
  std::vector<double> r(J);
  for (int j = 0; j + 1 < J; ++j) r[j] = d[j + 1] - d[j];
  r[J - 1] = d[0] + seam_jump - d[J - 1];
  return r;
}

LatticeSimulator::LatticeSimulator(std::shared_ptr<const LatticeModel> model, int force_range)
    : model_(std::move(model)), force_range_(force_range) {
  if (force_range_ < 1 || force_range_ > model_->range()) {
    throw SpecError("simulator: force range must lie in 1..M");
  }
  series_.resize(force_range_);
  series_radius_.assign(force_range_, 0.0);
  const auto* cm = dynamic_cast<const CalogeroMoserRemainder*>(&model_->remainder());
  const auto* poly = dynamic_cast<const PolynomialRemainder*>(&model_->remainder());
  for (int m = 1; m <= force_range_; ++m) {
    auto& e = series_[m - 1];
    if (cm) {
      const double a = cm->a();
      const double mm = static_cast<double>(m);
      const double scale = -a * std::pow(mm, -a - 1.0);
      e = {model_->alpha(m), model_->beta(m)};
      double inv = std::pow(mm, -3.0);
      for (double c : cm->phi_coefficients()) {
        e.push_back(scale * c * inv);
        inv /= mm;
      }
      series_radius_[m - 1] = CalogeroMoserRemainder::series_switch() * mm;
    } else if (poly) {
      e = {model_->alpha(m), model_->beta(m), poly->cubic(m)};
      series_radius_[m - 1] = std::numeric_limits<double>::infinity();
    }
  }
}

void LatticeSimulator::check_sizes(const LatticeState& s) const {
  if (static_cast<int>(s.d.size()) != s.J || static_cast<int>(s.v.size()) != s.J) {
    throw SpecError("lattice state: array sizes do not match J");
  }
  if (2 * force_range_ >= s.J) throw SpecError("simulator: force range must be below J/2");
}

double LatticeSimulator::fill_eta(const LatticeState& s, const std::vector<double>& ext, int m,
                                  std::vector<double>& eta, int& site) const {
  double emax = 0.0;
  for (int j = 0; j < s.J; ++j) {
    eta[j] = ext[j + m] - s.d[j];
    emax = std::max(emax, std::abs(eta[j]));
  }
  site = -1;
  if (emax > m * model_->delta_star()) {
    for (int j = 0; j < s.J; ++j) {
      if (std::abs(eta[j]) == emax) {
        site = j;
        break;
      }
    }
  }
  return emax;
}

std::size_t LatticeSimulator::terms_for(int m, double eta_max) const {
  const auto& e = series_[m - 1];
  if (series_radius_[m - 1] == std::numeric_limits<double>::infinity()) return e.size();
  if (eta_max == 0.0) return 1;
  const double base = std::abs(e[0]) * eta_max;
  double p = eta_max;
  std::size_t n = 1;
  while (n < e.size()) {
    p *= eta_max;
    if (std::abs(e[n]) * p < 1e-17 * base) break;
    ++n;
  }
  return n;
}

void LatticeSimulator::force(const LatticeState& s, std::vector<double>& F) const {
  check_sizes(s);
  const int J = s.J;
  const int Mf = force_range_;
  auto& ext = thread_buffer(0, J + Mf);
  auto& eta = thread_buffer(1, J);
  auto& acc = thread_buffer(2, J);
  extend(s, Mf, ext);
  F.assign(J, 0.0);
  const Remainder& rem = model_->remainder();
  for (int m = Mf; m >= 1; --m) {
    int site = -1;
    const double emax = fill_eta(s, ext, m, eta, site);
    if (site >= 0) {
      std::ostringstream os;
      os << "force: |d_{j+m} - d_j| = " << emax << " exceeds m*delta_star at site " << site
         << ", m = " << m;
      throw DomainError(os.str());
    }
    const auto& e = series_[m - 1];
    if (!e.empty() && emax < series_radius_[m - 1]) {
      const std::size_t K = terms_for(m, emax);
      const double top = e[K - 1];
      for (int j = 0; j < J; ++j) acc[j] = top;
      for (std::size_t i = K - 1; i-- > 0;) {
        const double c = e[i];
        for (int j = 0; j < J; ++j) acc[j] = acc[j] * eta[j] + c;
      }
      for (int j = 0; j < J; ++j) acc[j] *= eta[j];
    } else {
      const double al = model_->alpha(m), be = model_->beta(m);
      for (int j = 0; j < J; ++j) {
        const double x = eta[j];
        acc[j] = al * x + be * x * x + rem.psi_prime(m, x);
      }
    }
    for (int j = 0; j < J; ++j) F[j] += acc[j];
    for (int j = 0; j < J - m; ++j) F[j + m] -= acc[j];
    for (int j = J - m; j < J; ++j) F[j + m - J] -= acc[j];
  }
}

std::vector<double> LatticeSimulator::force(const LatticeState& s) const {
  std::vector<double> F;
  force(s, F);
  return F;
}

void LatticeSimulator::step_verlet(LatticeState& s, double dt) const {
  if (static_cast<int>(s.force_cache.size()) != s.J) force(s, s.force_cache);
  const double h = 0.5 * dt;
  for (int j = 0; j < s.J; ++j) {
    s.v[j] += h * s.force_cache[j];
    s.d[j] += dt * s.v[j];
  }
  force(s, s.force_cache);
  for (int j = 0; j < s.J; ++j) s.v[j] += h * s.force_cache[j];
  s.t += dt;
}

double LatticeSimulator::total_energy(const LatticeState& s) const {
  check_sizes(s);
  const int J = s.J;
  const int Mf = force_range_;
  auto& ext = thread_buffer(0, J + Mf);
  auto& eta = thread_buffer(1, J);
  extend(s, Mf, ext);
  double kinetic = 0.0;
  for (double v : s.v) kinetic += 0.5 * v * v;
  double potential = 0.0;
  std::vector<double> g;
  for (int m = Mf; m >= 1; --m) {
    int site = -1;
    const double emax = fill_eta(s, ext, m, eta, site);
    if (site >= 0) throw DomainError("total_energy: strain outside the potential domain");
    const auto& e = series_[m - 1];
    double sum = 0.0;
    if (!e.empty() && emax < series_radius_[m - 1]) {
      // Antiderivative sum_i e_i eta^{i+1} / (i+1) = eta^2 sum_i g_i eta^{i-1}.
      const std::size_t K = terms_for(m, emax);
      g.resize(K);
      for (std::size_t i = 0; i < K; ++i) g[i] = e[i] / static_cast<double>(i + 2);
      for (int j = 0; j < J; ++j) {
        const double x = eta[j];
        double a = g[K - 1];
        for (std::size_t i = K - 1; i-- > 0;) a = a * x + g[i];
        sum += a * x * x;
      }
    } else {
      for (int j = 0; j < J; ++j) sum += model_->pair_energy(m, eta[j]);
    }
    potential += sum;
  }
  return kinetic + potential;
}

int default_force_range(const LatticeModel& model, int J, double rel_tol) {
  int M = std::min(model.range(), J / 2 - 1);
  if (auto a = model.cm_exponent()) {
    const double c0 = c0_sq(model);
    const double C = *a * (*a + 1.0);
    int m = 1;
    while (m < M && C * zeta_tail(*a, m) > rel_tol * c0) ++m;
    M = std::min(M, m);
  }
  return std::max(M, 1);
}

LatticeState init_from_wave(const WaveSolution& sol, const LatticeModel& model, int J, double j_c) {
  const double eps = sol.eps;
  const Grid& grid = sol.W.grid();
  const double L = grid.L();
  LatticeState s = LatticeState::flat(J);
  if (eps == 0.0) return s;
  if (eps * J < 4.0 * L) {
    std::ostringstream os;
    os << "init_from_wave: eps J = " << eps * J << " is below 4 L = " << 4.0 * L;
    throw SpecError(os.str());
  }
  const FourierInterpolant W(sol.W);
  const double mean = W.mean();
  const double jump = 2.0 * L * mean;
  const double c = std::sqrt(sol.c_eps_sq);
  for (int j = 0; j < J; ++j) {
    const double x = eps * (j - j_c);
    double U = 0.0, w = 0.0;
    if (x >= L) {
      U = jump;
    } else if (x > -L) {
      U = mean * (x + L) + W.antiderivative_periodic(x);
      w = W.value(x);
    }
    s.d[j] = eps * U;
    s.v[j] = -eps * eps * c * w;
  }
  s.seam_jump = eps * jump;
  const auto r = s.strain();
  for (int j = 0; j < J; ++j) {
    if (std::abs(r[j]) > model.delta_star()) {
      throw DomainError("init_from_wave: strain at site " + std::to_string(j) +
                        " exceeds delta_star");
    }
  }
  return s;
}

namespace {

struct Peak {
  double position;  // within [0, J)
  double value;
};

Peak locate_peak(const std::vector<double>& r) {
  const int J = static_cast<int>(r.size());
  int best = 0;
  for (int j = 1; j < J; ++j) {
    if (std::abs(r[j]) > std::abs(r[best])) best = j;
  }
  const double ym = r[(best - 1 + J) % J], y0 = r[best], yp = r[(best + 1) % J];
  const double den = ym - 2.0 * y0 + yp;
  const double delta = den != 0.0 ? 0.5 * (ym - yp) / den : 0.0;
  // r_j sits between sites j and j+1.
  return {best + 0.5 + delta, y0 - 0.25 * (ym - yp) * delta};
}

// r(j - shift) by Fourier interpolation over the period J.
std::vector<double> shift_periodic(const std::vector<double>& r, double shift) {
  const int J = static_cast<int>(r.size());
  Spectrum s(J / 2 + 1);
  fft_forward(r, s);
  for (int k = 0; k <= J / 2; ++k) {
    s[k] *= std::polar(1.0, -2.0 * kPi * k * shift / J);
  }
  s[J / 2] = std::real(s[J / 2]);
  std::vector<double> out(J);
  fft_inverse(s, out);
  return out;
}

}  // namespace

VerificationReport run_and_verify(const WaveSolution& sol, std::shared_ptr<const LatticeModel> model,
                                  const SimulationOptions& opts) {
  if (opts.J < 16 || opts.J % 2 != 0) throw SpecError("simulate: J must be even and >= 16");
  if (!(opts.T > 0.0)) throw SpecError("simulate: T must be positive");
  VerificationReport rep;
  const double c0 = std::sqrt(c0_sq(*model));
  rep.dt = opts.dt > 0.0 ? opts.dt : 0.05 / c0;
  if (rep.dt > 0.1 / c0) throw SpecError("simulate: dt exceeds 0.1 / c_0");
  rep.force_range = opts.force_range > 0 ? opts.force_range : default_force_range(*model, opts.J);
  rep.predicted_speed = std::sqrt(sol.c_eps_sq);

  const LatticeSimulator sim(model, rep.force_range);
  const double j_c = opts.J * opts.jc_fraction + opts.jc_offset;
  LatticeState s = init_from_wave(sol, *model, opts.J, j_c);

  const long steps = std::max(1L, std::lround(opts.T / rep.dt));
  const long every = std::max(1L, std::lround(opts.checkpoint_interval / rep.dt));
  const double margin = sol.eps > 0.0 ? 0.5 * sol.W.grid().L() / sol.eps : 0.0;

  const std::vector<double> r0 = s.strain();
  double r0_norm = 0.0;
  for (double v : r0) r0_norm += v * v;
  r0_norm = std::sqrt(r0_norm);

  double unwrapped = 0.0;
  auto checkpoint = [&](bool first) {
    const std::vector<double> r = s.strain();
    const Peak pk = locate_peak(r);
    if (first) {
      unwrapped = pk.position;
    } else {
      unwrapped = pk.position + opts.J * std::round((unwrapped - pk.position) / opts.J);
    }
    TrajectoryPoint tp{s.t, unwrapped, pk.value, sim.total_energy(s)};
    rep.trajectory.push_back(tp);
    if (!first && r0_norm > 0.0) {
      const auto moved = shift_periodic(r0, unwrapped - rep.trajectory.front().peak_position);
      double num = 0.0;
      for (int j = 0; j < opts.J; ++j) num += (r[j] - moved[j]) * (r[j] - moved[j]);
      rep.shape_error = std::max(rep.shape_error, std::sqrt(num) / r0_norm);
    }
    const double wrapped = std::fmod(unwrapped, static_cast<double>(opts.J));
    const double pos = wrapped < 0 ? wrapped + opts.J : wrapped;
    return pos < margin || pos > opts.J - margin;
  };

  checkpoint(true);
  rep.initial_energy = rep.trajectory.front().energy;
  for (long n = 1; n <= steps; ++n) {
    sim.step_verlet(s, rep.dt);
    rep.steps = n;
    if (n % every == 0 || n == steps) {
      if (checkpoint(false)) {
        rep.early_stop = true;
        break;
      }
    }
  }
  rep.t_final = s.t;

  const double E0 = rep.initial_energy;
  for (const auto& tp : rep.trajectory) {
    const double d = std::abs(tp.energy - E0);
    rep.energy_drift = std::max(rep.energy_drift, E0 != 0.0 ? d / std::abs(E0) : d);
  }
  const std::size_t n = rep.trajectory.size();
  if (n >= 2) {
    double st = 0, sp = 0, stt = 0, stp = 0;
    for (const auto& tp : rep.trajectory) {
      st += tp.t;
      sp += tp.peak_position;
      stt += tp.t * tp.t;
      stp += tp.t * tp.peak_position;
    }
    const double nn = static_cast<double>(n);
    rep.measured_speed = (nn * stp - st * sp) / (nn * stt - st * st);
    rep.speed_error = rep.predicted_speed > 0.0
                          ? std::abs(rep.measured_speed - rep.predicted_speed) / rep.predicted_speed
                          : 0.0;
  }
  return rep;
}

}  // namespace lrfput
