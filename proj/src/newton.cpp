#include "slowfast/newton.hpp"

#include <cmath>

namespace slowfast {

Mat fd_jacobian_of(const VecFn& F, const Vec& x) {
  const auto n = x.size();
  Vec xp = x, xm = x;
  Vec f0 = F(x);
  Mat J(f0.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = std::max(1e-7, 1e-7 * std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    J.col(j) = (F(xp) - F(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

NewtonResult damped_newton(const VecFn& F, const std::optional<VecJacFn>& jac,
                           const Vec& x0, const NewtonConfig& cfg) {
  NewtonResult res;
  res.x = x0;
  Vec r = F(res.x);
  res.residual = r.lpNorm<Eigen::Infinity>();
  for (res.iterations = 0; res.iterations < cfg.max_iter; ++res.iterations) {
    if (res.residual <= cfg.tol) {
      res.converged = true;
      break;
    }
    Mat J = jac ? (*jac)(res.x) : fd_jacobian_of(F, res.x);
    Eigen::FullPivLU<Mat> lu(J);
    lu.setThreshold(1e-12);
    res.singular = !lu.isInvertible();
    Vec step = lu.solve(-r);
    if (!all_finite(step)) break;
    double alpha = 1.0;
    Vec x_try, r_try;
    double best = res.residual;
    bool improved = false;
    while (alpha >= cfg.min_damping) {
      x_try = res.x + alpha * step;
      r_try = F(x_try);
      const double nrm = r_try.lpNorm<Eigen::Infinity>();
      if (std::isfinite(nrm) && nrm < best) {
        res.x = x_try;
        r = r_try;
        res.residual = nrm;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (res.residual <= cfg.tol) res.converged = true;
  if (res.converged) {
    Mat J = jac ? (*jac)(res.x) : fd_jacobian_of(F, res.x);
    Eigen::FullPivLU<Mat> lu(J);
    lu.setThreshold(1e-12);
    res.singular = !lu.isInvertible();
  }
  return res;
}

} // namespace slowfast
