#include "lrfput/wave_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "lrfput/errors.hpp"
#include "lrfput/krylov.hpp"

namespace lrfput {

namespace {

constexpr double kRequiredLinearResidual = 1e-11;
constexpr int kDenseLimit = 4096;

Eigen::Map<const Eigen::VectorXd> as_vector(const Field& F) {
  return {F.data().data(), static_cast<Eigen::Index>(F.size())};
}

Field dense_even_solve(const Grid& grid, const Field& F,
                       const std::function<Field(const Field&)>& op) {
  const int N = grid.N();
  const int h = N / 2 + 1;
  Eigen::MatrixXd A(h, h);
  Field e(grid);
  for (int n = 0; n < h; ++n) {
    std::fill(e.data().begin(), e.data().end(), 0.0);
    e[n] = 1.0;
    e[grid.mirror(n)] = 1.0;
    const Field col = project_even(op(e));
    for (int i = 0; i < h; ++i) A(i, n) = col[i];
  }
  const Field Fe = project_even(F);
  Eigen::VectorXd rhs(h);
  for (int i = 0; i < h; ++i) rhs(i) = Fe[i];
  const Eigen::VectorXd y = A.partialPivLu().solve(rhs);
  Field V(grid);
  for (int n = 0; n < h; ++n) {
    V[n] = y(n);
    V[grid.mirror(n)] = y(n);
  }
  return V;
}

double relative_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (int n = 0; n < a.size(); ++n) {
    num += (a[n] - b[n]) * (a[n] - b[n]);
    den += b[n] * b[n];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

bool all_nonpositive(const Field& W) {
  return std::all_of(W.data().begin(), W.data().end(), [](double v) { return v <= 0.0; });
}

}  // namespace

std::string to_string(SolveMethod method) {
  return method == SolveMethod::Contraction ? "contraction" : "petviashvili";
}

Field kdv_profile(const OperatorContext& ctx) { return ctx.W0(); }

double wave_speed_sq(const OperatorContext& ctx) { return ctx.c_eps_sq(); }

double residual(const OperatorContext& ctx, const Field& W) {
  Field r = ctx.B(W);
  r -= ctx.Q(W, W);
  if (ctx.eps() > 0.0) r.axpy(-ctx.eps() * ctx.eps(), ctx.P(W));
  return sobolev_norm(r, 1.0);
}

Field L_eps_solve_dense(const OperatorContext& ctx, const Field& F) {
  return dense_even_solve(ctx.grid(), F, [&](const Field& v) { return ctx.L(v); });
}

Field L0_solve_dense(const OperatorContext& ctx, const Field& F) {
  return dense_even_solve(ctx.grid(), F, [&](const Field& v) { return ctx.L0(v); });
}

Field L_eps_solve(const OperatorContext& ctx, const Field& F, const SolverOptions& opts,
                  const Field* guess, LinearSolveInfo* info) {
  const Grid& grid = ctx.grid();
  const Field Fe = project_even(F);
  Eigen::VectorXd b = as_vector(Fe);
  Eigen::VectorXd x = guess ? Eigen::VectorXd(as_vector(project_even(*guess)))
                            : Eigen::VectorXd::Zero(b.size());
  Field work(grid);
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    std::copy(v.data(), v.data() + v.size(), work.data().begin());
    Field r = ctx.L(work);
    project_even_inplace(r.data());
    out = as_vector(r);
  };
  const GmresResult res =
      gmres(apply, b, x, opts.restart, opts.linear_max_iter, opts.linear_rtol);
  LinearSolveInfo local;
  local.iterations = res.iterations;
  local.relative_residual = res.relative_residual;
  Field V(grid, std::vector<double>(x.data(), x.data() + x.size()));
  if (res.relative_residual > kRequiredLinearResidual) {
    if (!(opts.dense_fallback && grid.N() <= kDenseLimit)) {
      std::ostringstream os;
      os << "L_eps solve stagnated: relative residual " << res.relative_residual << " after "
         << res.iterations << " iterations";
      throw SolverError(os.str(), res.relative_residual);
    }
    V = L_eps_solve_dense(ctx, Fe);
    local.dense = true;
    local.relative_residual = relative_l2(project_even(ctx.L(V)), Fe);
    if (local.relative_residual > kRequiredLinearResidual) {
      throw SolverError("L_eps dense fallback failed", local.relative_residual);
    }
  }
  if (info) *info = local;
  return V;
}

WaveSolution solve_contraction(const OperatorContext& ctx, const SolverOptions& opts) {
  if (!(ctx.eps() > 0.0)) throw DomainError("solve_contraction requires eps > 0");
  const Grid& grid = ctx.grid();
  const double es = std::pow(ctx.eps(), ctx.sigma());
  const double e2 = ctx.eps() * ctx.eps();
  const Field R = ctx.R();

  WaveSolution sol(grid);
  sol.eps = ctx.eps();
  sol.sigma = ctx.sigma();
  sol.c_eps_sq = ctx.c_eps_sq();
  sol.method = SolveMethod::Contraction;

  Field V(grid);
  double first_norm = 0.0;
  double inc = 0.0;
  bool converged = false;
  for (int n = 1; n <= opts.max_iter; ++n) {
    Field rhs = R;
    if (n > 1) {
      rhs.axpy(es, ctx.Q(V, V));
      rhs.axpy(e2, ctx.N(V));
    }
    Field g = ctx.B_inv(rhs);
    LinearSolveInfo info;
    Field next = L_eps_solve(ctx, g, opts, n > 1 ? &V : nullptr, &info);
    project_even_inplace(next.data());
    sol.linear_iterations += info.iterations;

    inc = sobolev_norm(next - V, 1.0);
    const double norm = sobolev_norm(next, 1.0);
    if (!std::isfinite(norm)) throw SolverError("contraction failure: non-finite iterate", inc);
    if (n == 1) first_norm = norm;
    if (norm > 10.0 * first_norm) {
      std::ostringstream os;
      os << "contraction failure at eps = " << ctx.eps() << ": iterate norm " << norm
         << " exceeds 10x the first iterate";
      throw SolverError(os.str(), inc);
    }
    sol.increments.push_back(inc);
    V = std::move(next);
    sol.iterations = n;
    if (inc < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "contraction did not converge in " << opts.max_iter << " iterations";
    throw SolverError(os.str(), inc);
  }

  const double floor = 10.0 * opts.tol;
  for (std::size_t i = 3; i < sol.increments.size(); ++i) {
    if (sol.increments[i - 1] > floor && sol.increments[i] >= sol.increments[i - 1]) {
      sol.monotone = false;
    }
  }
  sol.V = V;
  sol.W = ctx.W0();
  sol.W.axpy(es, V);
  sol.residual_H1 = residual(ctx, sol.W);
  sol.nonpositive = all_nonpositive(sol.W);
  return sol;
}

WaveSolution solve_petviashvili(const OperatorContext& ctx, const SolverOptions& opts) {
  const Grid& grid = ctx.grid();
  const double e2 = ctx.eps() * ctx.eps();
  const double w0_norm = sobolev_norm(ctx.W0(), 1.0);

  WaveSolution sol(grid);
  sol.eps = ctx.eps();
  sol.sigma = ctx.sigma();
  sol.c_eps_sq = ctx.c_eps_sq();
  sol.method = SolveMethod::Petviashvili;

  Field W = ctx.W0();
  double inc = 0.0;
  double S = 0.0;
  bool converged = false;
  for (int n = 1; n <= opts.max_iter; ++n) {
    Field nl = ctx.Q(W, W);
    if (e2 > 0.0) nl.axpy(e2, ctx.P(W));
    const double num = l2_inner(W, ctx.B(W));
    const double den = l2_inner(W, nl);
    S = num / den;
    if (!(S > 0.0) || !std::isfinite(S)) {
      std::ostringstream os;
      os << "Petviashvili failure: stabilising factor S = " << S;
      throw SolverError(os.str(), S);
    }
    Field next = ctx.B_inv(nl);
    next *= S * S;
    project_even_inplace(next.data());
    inc = sobolev_norm(next - W, 1.0);
    const double norm = sobolev_norm(next, 1.0);
    if (!std::isfinite(norm) || norm > 10.0 * w0_norm) {
      throw SolverError("Petviashvili failure: iterate diverged", inc);
    }
    sol.increments.push_back(inc);
    W = std::move(next);
    sol.iterations = n;
    if (std::abs(S - 1.0) < opts.tol && inc < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "Petviashvili did not converge in " << opts.max_iter << " iterations (|S-1| = "
       << std::abs(S - 1.0) << ")";
    throw SolverError(os.str(), inc);
  }
  sol.W = W;
  if (ctx.eps() > 0.0) {
    sol.V = W - ctx.W0();
    sol.V *= std::pow(ctx.eps(), -ctx.sigma());
  }
  sol.residual_H1 = residual(ctx, W);
  sol.nonpositive = all_nonpositive(W);
  return sol;
}

SweepReport correction_scaling_sweep(std::shared_ptr<const LatticeModel> model,
                                     const DispersionProfile& profile, const Grid& grid,
                                     double sigma, const std::vector<double>& eps_list,
                                     const SolverOptions& opts, double eps_max,
                                     unsigned max_threads) {
  if (eps_list.size() < 5) throw SpecError("scaling sweep needs at least 5 eps values");
  for (double e : eps_list) {
    if (!(e > 0.0 && e <= eps_max)) {
      std::ostringstream os;
      os << "scaling sweep: eps = " << e << " outside (0, " << eps_max << "]";
      throw SpecError(os.str());
    }
  }
  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());

  auto solve_one = [&](double eps) {
    SweepRow row;
    row.eps = eps;
    try {
      const OperatorContext ctx(model, profile, grid, eps, sigma);
      const WaveSolution sol = solve_contraction(ctx, opts);
      row.diff_H1 = sobolev_norm(sol.W - ctx.W0(), 1.0);
      row.V_H1 = sobolev_norm(sol.V, 1.0);
      row.residual = sol.residual_H1;
      row.iterations = sol.iterations;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  };

  SweepReport report;
  report.rows.resize(eps_list.size());
  for (std::size_t start = 0; start < eps_list.size(); start += max_threads) {
    const std::size_t stop = std::min(eps_list.size(), start + max_threads);
    std::vector<std::future<SweepRow>> jobs;
    for (std::size_t i = start; i < stop; ++i) {
      if (max_threads == 1) {
        report.rows[i] = solve_one(eps_list[i]);
      } else {
        jobs.push_back(std::async(std::launch::async, solve_one, eps_list[i]));
      }
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) report.rows[start + i] = jobs[i].get();
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : report.rows) {
    if (!r.ok || !(r.diff_H1 > 0.0)) continue;
    const double x = std::log(r.eps), y = std::log(r.diff_H1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++report.n_ok;
  }
  if (report.n_ok >= 2) {
    const double n = report.n_ok;
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.intercept = (sy - report.slope * sx) / n;
    report.fit_ok = true;
  }
  return report;
}

}  // namespace lrfput
