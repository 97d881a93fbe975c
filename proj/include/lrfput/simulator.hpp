#pragma once

// Direct integration of the finite long-range lattice
//   u_j'' = sum_m Phi'_m(u_{j+m} - u_j) - Phi'_m(u_j - u_{j-m})
// started from a computed solitary wave.
//
// Displacements d_j = u_j - j obey the helical condition d_{j+J} = d_j + D,
// where D is the net jump of the kink U. Strains d_{j+1} - d_j are periodic.

#include <memory>
#include <vector>

#include "lrfput/lattice_catalog.hpp"
#include "lrfput/wave_solver.hpp"

namespace lrfput {

struct LatticeState {
  int J = 0;
  std::vector<double> d;  ///< displacement from equilibrium
  std::vector<double> v;  ///< velocity
  double t = 0.0;
  double seam_jump = 0.0;  ///< D in d_{j+J} = d_j + D
  /// Force at the current d; cleared whenever d is modified outside step_verlet.
  std::vector<double> force_cache;

  static LatticeState flat(int J);
  /// r_j = d_{j+1} - d_j with the helical wrap.
  std::vector<double> strain() const;
};

class LatticeSimulator {
 public:
  /// force_range <= M; it must also be below J/2 for every state used.
  LatticeSimulator(std::shared_ptr<const LatticeModel> model, int force_range);

  const LatticeModel& model() const { return *model_; }
  int force_range() const { return force_range_; }

  /// F_j = sum_{m <= M_f} f_m(d_{j+m} - d_j) - f_m(d_j - d_{j-m}) with
  /// f_m(eta) = Phi'_m(m + eta) - varsigma_m. DomainError naming the site and m
  /// when |d_{j+m} - d_j| > m delta_star.
  void force(const LatticeState& s, std::vector<double>& F) const;
  std::vector<double> force(const LatticeState& s) const;
  /// One velocity-Verlet step; dt may be negative.
  void step_verlet(LatticeState& s, double dt) const;
  /// sum v^2/2 + sum_j sum_{m <= M_f} [Phi_m(m + eta) - Phi_m(m) - varsigma_m eta].
  double total_energy(const LatticeState& s) const;

 private:
  // Coefficients e_1, e_2, ... of f_m(eta) = sum_i e_i eta^i, or empty when
  // f_m has no usable power series.
  std::vector<std::vector<double>> series_;
  std::vector<double> series_radius_;  // |eta| bound below which the series is used
  void check_sizes(const LatticeState& s) const;
  // Fills eta_j = d_{j+m} - d_j; returns max |eta| and its site.
  double fill_eta(const LatticeState& s, const std::vector<double>& ext, int m,
                  std::vector<double>& eta, int& site) const;
  std::size_t terms_for(int m, double eta_max) const;

  std::shared_ptr<const LatticeModel> model_;
  int force_range_;
};

/// Smallest m with sum_{m' > m} alpha_m' m'^2 <= rel_tol * c_0^2, capped by M and J/2 - 1.
int default_force_range(const LatticeModel& model, int J, double rel_tol = 1e-6);

/// Lattice state d_j = eps U(eps (j - j_c)), v_j = -eps^2 c_eps W(eps (j - j_c)),
/// U' = W, U(-L) = 0, with W taken as 0 outside [-L, L).
/// SpecError unless eps J >= 4 L; DomainError if a strain exceeds delta_star.
LatticeState init_from_wave(const WaveSolution& sol, const LatticeModel& model, int J, double j_c);

struct SimulationOptions {
  int J = 4096;
  double T = 200.0;
  double dt = 0.0;  ///< 0 selects 0.05 / c_0
  int force_range = 0;  ///< 0 selects default_force_range
  double checkpoint_interval = 1.0;
  double jc_fraction = 0.25;
  double jc_offset = 0.0;
};

struct TrajectoryPoint {
  double t = 0.0;
  double peak_position = 0.0;  ///< unwrapped lattice coordinate of the strain extremum
  double peak_value = 0.0;
  double energy = 0.0;
};

struct VerificationReport {
  double predicted_speed = 0.0;
  double measured_speed = 0.0;
  double speed_error = 0.0;   ///< relative
  double shape_error = 0.0;   ///< max relative l2 distance to the translated initial strain
  double energy_drift = 0.0;  ///< max |E(t) - E(0)| / |E(0)|
  double initial_energy = 0.0;
  double dt = 0.0;
  int force_range = 0;
  long steps = 0;
  double t_final = 0.0;
  bool early_stop = false;  ///< the wave came within L / (2 eps) sites of the seam
  std::vector<TrajectoryPoint> trajectory;
};

VerificationReport run_and_verify(const WaveSolution& sol, std::shared_ptr<const LatticeModel> model,
                                  const SimulationOptions& opts = {});

}  // namespace lrfput
