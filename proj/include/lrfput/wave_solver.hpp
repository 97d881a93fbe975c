#pragma once

// Solitary-wave profiles W_eps = W0 + eps^sigma V_eps of
//   B_eps W = Q_eps(W, W) + eps^2 P_eps(W).

#include <memory>
#include <string>
#include <vector>

#include "lrfput/operators.hpp"

namespace lrfput {

enum class SolveMethod { Contraction, Petviashvili };
std::string to_string(SolveMethod method);

struct SolverOptions {
  double tol = 1e-12;       ///< H^1 increment (and |S - 1| for Petviashvili)
  int max_iter = 200;
  double linear_rtol = 1e-12;
  int restart = 50;
  int linear_max_iter = 500;
  bool dense_fallback = true;  ///< dense solve when GMRES stalls and N <= 4096
};

struct WaveSolution {
  explicit WaveSolution(const Grid& grid) : W(grid), V(grid) {}

  double eps = 0.0;
  double sigma = 0.0;
  double c_eps_sq = 0.0;
  Field W;  ///< full profile W0 + eps^sigma V
  Field V;  ///< correction
  double residual_H1 = 0.0;
  int iterations = 0;
  SolveMethod method = SolveMethod::Contraction;
  /// H^1 norms of successive increments.
  std::vector<double> increments;
  /// Increment ratios stayed below 1 after the third iteration (above the noise floor).
  bool monotone = true;
  int linear_iterations = 0;
  /// W <= 0 at every grid point; expected for Calogero-Moser waves, not enforced.
  bool nonpositive = false;
};

/// The KdV profile of the context.
Field kdv_profile(const OperatorContext& ctx);
/// c_0^2 - lambda''(0) eps^2 / 2.
double wave_speed_sq(const OperatorContext& ctx);

/// ||B W - Q(W, W) - eps^2 P(W)||_{H^1}.
double residual(const OperatorContext& ctx, const Field& W);

struct LinearSolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
  bool dense = false;
};

/// Solves L_eps V = F on even fields by restarted GMRES with even projection;
/// falls back to a dense solve when allowed. SolverError (carrying the final
/// relative residual) if neither reaches 1e-11.
Field L_eps_solve(const OperatorContext& ctx, const Field& F, const SolverOptions& opts = {},
                  const Field* guess = nullptr, LinearSolveInfo* info = nullptr);
/// Dense LU solve of L_eps V = F on the even subspace (N/2 + 1 unknowns).
Field L_eps_solve_dense(const OperatorContext& ctx, const Field& F);
/// Dense LU solve of L_0 V = F on the even subspace.
Field L0_solve_dense(const OperatorContext& ctx, const Field& F);

/// Iterates V <- L^-1 B^-1 [R + eps^sigma Q(V, V) + eps^2 N(V)] from V = 0.
/// SolverError on divergence (||V_n|| > 10 ||V_1||) or when max_iter is hit.
WaveSolution solve_contraction(const OperatorContext& ctx, const SolverOptions& opts = {});

/// Petviashvili iteration W <- S^2 B^-1 [Q(W, W) + eps^2 P(W)] seeded with W0,
/// S = <W, B W> / <W, Q(W, W) + eps^2 P(W)>. SolverError if S <= 0, on
/// divergence, or when max_iter is hit.
WaveSolution solve_petviashvili(const OperatorContext& ctx, const SolverOptions& opts = {});

struct SweepRow {
  double eps = 0.0;
  double diff_H1 = 0.0;  ///< ||W_eps - W0||_{H^1}
  double V_H1 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool ok = false;
  std::string error;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double slope = 0.0;  ///< least-squares slope of log diff_H1 against log eps
  double intercept = 0.0;
  int n_ok = 0;
  bool fit_ok = false;  ///< at least two rows converged
};

/// Contraction solves at each eps (in parallel, at most max_threads at once;
/// 0 means hardware concurrency). Needs at least 5 values in (0, eps_max].
/// Failed solves are reported per row and excluded from the fit.
SweepReport correction_scaling_sweep(std::shared_ptr<const LatticeModel> model,
                                     const DispersionProfile& profile, const Grid& grid,
                                     double sigma, const std::vector<double>& eps_list,
                                     const SolverOptions& opts = {}, double eps_max = 0.5,
                                     unsigned max_threads = 0);

}  // namespace lrfput
