#pragma once

// Restarted GMRES for matrix-free linear operators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace lrfput {

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Solves A x = b with GMRES(restart), starting from the given x.
/// `apply(v, out)` writes A v into out. Stops when ||b - A x|| <= rtol ||b||
/// (the true residual is recomputed at every restart) or after max_iter
/// inner iterations.
template <class Apply>
GmresResult gmres(Apply&& apply, const Eigen::VectorXd& b, Eigen::VectorXd& x, int restart,
                  int max_iter, double rtol) {
  GmresResult res;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd V(n, restart + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
  Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);
  Eigen::VectorXd w(n), r(n);

  while (true) {
    apply(x, r);
    r = b - r;
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iter) return res;

    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    H.setZero();
    int j = 0;
    for (; j < restart && res.iterations < max_iter; ++j) {
      apply(V.col(j), w);
      ++res.iterations;
      // Modified Gram-Schmidt, applied twice.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const double h = V.col(i).dot(w);
          H(i, j) += h;
          w -= h * V.col(i);
        }
      }
      const double hnext = w.norm();
      H(j + 1, j) = hnext;
      if (hnext > 0.0) V.col(j + 1) = w / hnext;
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = H(j, j) / denom;
      sn(j) = H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      if (std::abs(g(j + 1)) <= 0.5 * rtol * bnorm || hnext == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution on the j x j upper triangle.
    const Eigen::VectorXd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += V.leftCols(j) * y;
  }
}

}  // namespace lrfput
