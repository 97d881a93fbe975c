#pragma once

// Long-wave operators of the rescaled traveling-wave equation
//   B_eps W = Q_eps(W, W) + eps^2 P_eps(W)
// and of the corrector problem for W = W0 + eps^sigma V.

#include <memory>
#include <vector>

#include "lrfput/dispersion.hpp"
#include "lrfput/lattice_catalog.hpp"
#include "lrfput/spectral.hpp"

namespace lrfput {

/// Averaging operator A_h: multiplier sinc(h k / 2).
Field averaging(double h, const Field& F);
/// Theta_h: multiplier (sinc(h k / 2) - 1) / (h k)^2, equal to -1/24 at k = 0.
/// (A_h - 1) F = -h^2 Theta_h F''.
Field theta_op(double h, const Field& F);
/// Symbol of Theta_h at wavenumber k.
double theta_symbol(double h, double k);

/// Immutable operator set for one (model, grid, eps, sigma).
///
/// eps = 0 selects the limit operators (B_0, Q_0, P = 0). For eps > 0 the
/// sums over m in Q_eps and P_eps stop at min(M, ceil(2L / eps)): beyond that
/// the averaging window exceeds the period.
class OperatorContext {
 public:
  /// Throws CertificationError if eps > 0 and the profile is not certified,
  /// if lambda''(0) >= 0, or if the B_eps multiplier dips below
  /// |lambda''(0)| / 2 * (1 - 1e-6) on the grid. DegeneracyError if b = 0.
  OperatorContext(std::shared_ptr<const LatticeModel> model, DispersionProfile profile, Grid grid,
                  double eps, double sigma, bool dealias = true);
  OperatorContext(const LatticeModel& model, const DispersionProfile& profile, const Grid& grid,
                  double eps, double sigma, bool dealias = true);

  const LatticeModel& model() const { return *model_; }
  std::shared_ptr<const LatticeModel> model_ptr() const { return model_; }
  const DispersionProfile& profile() const { return profile_; }
  const Grid& grid() const { return grid_; }
  double eps() const { return eps_; }
  double sigma() const { return sigma_; }
  bool dealias() const { return dealias_; }
  double b() const { return b_; }
  double c0_sq() const { return c0_sq_; }
  double lambda_dd0() const { return lambda_dd0_; }
  /// c_eps^2 = c_0^2 - lambda''(0) eps^2 / 2.
  double c_eps_sq() const { return c0_sq_ - 0.5 * lambda_dd0_ * eps_ * eps_; }
  /// Number of interaction ranges summed in Q_eps and P_eps.
  int op_range() const { return op_range_; }

  /// Multiplier values at k_j.
  const std::vector<double>& B_symbol() const { return B_; }
  const std::vector<double>& B0_symbol() const { return B0_; }
  double B_symbol_min() const;
  /// (c_0^2 - lambda_lower) eps^-2 + |lambda''(0)| / 2.
  double B_upper_bound() const;

  Field B(const Field& F) const;
  Field B_inv(const Field& F) const;
  Field B0(const Field& F) const;
  Field B0_inv(const Field& F) const;
  Field B_minus_B0(const Field& F) const;
  Field B_inv_minus_B0_inv(const Field& F) const;

  /// sum_m beta_m m^3 A_{eps m}[(A_{eps m} V)(A_{eps m} W)].
  Field Q(const Field& V, const Field& W) const;
  /// b V W.
  Field Q0(const Field& V, const Field& W) const;
  /// Q(W0, V) using cached averages of W0.
  Field Q_W0(const Field& V) const;
  /// eps^-6 sum_m m A_{eps m}[Psi'_m(m eps^2 A_{eps m} W)].
  /// DomainError naming m when eps^2 |A_{eps m} W| exceeds delta_star.
  Field P(const Field& W) const;

  /// KdV profile -(3 lambda''(0) / (4 b)) sech^2(x / 2).
  const Field& W0() const { return W0_; }
  double W0_amplitude() const { return -3.0 * lambda_dd0_ / (4.0 * b_); }

  /// eps^-sigma [-(B - B0) W0 + (Q - Q0)(W0, W0) + eps^2 P(W0)].
  Field R() const;
  /// eps^-sigma [-B W0 + Q(W0, W0) + eps^2 P(W0)], for cross-checks only.
  Field R_naive() const;
  /// eps^-sigma [P(W0 + eps^sigma V) - P(W0)].
  Field N(const Field& V) const;
  /// V - 2 B^-1 Q(W0, V).
  Field L(const Field& V) const;
  /// V - 2 B0^-1 Q0(W0, V) = V + (4 b / lambda''(0)) (1 - d^2)^-1 [W0 V].
  Field L0(const Field& V) const;

 private:
  void build();
  const double* sinc_row(int m) const { return sinc_.data() + static_cast<std::size_t>(m - 1) * modes_; }
  Spectrum Q_hat(const Spectrum& V, const Spectrum& W) const;
  Spectrum Q_W0_hat(const Spectrum& V) const;
  Spectrum P_hat(const Spectrum& W) const;
  Field with_symbol(const Field& F, const std::vector<double>& symbol) const;

  std::shared_ptr<const LatticeModel> model_;
  DispersionProfile profile_;
  Grid grid_;
  double eps_;
  double sigma_;
  bool dealias_;
  Dealiaser dealiaser_;
  int modes_;
  double b_ = 0.0;
  double c0_sq_ = 0.0;
  double lambda_dd0_ = 0.0;
  int op_range_ = 0;

  std::vector<double> B_, B_inv_, B0_, B0_inv_, B_minus_B0_, B_inv_minus_B0_inv_;
  std::vector<double> sinc_;  // op_range x modes
  std::vector<double> qcoef_; // beta_m m^3

  Field W0_;
  Spectrum W0_hat_;
  std::vector<double> AW0_;  // padded physical averages of W0, op_range x Np (may be empty)
  Spectrum P_W0_hat_;
};

}  // namespace lrfput
