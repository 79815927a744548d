#include "slowfast/system.hpp"

#include <cmath>

namespace slowfast {

SlowFastSystem::SlowFastSystem(int n, int m, BlockFn f0, BlockFn g0,
                               ParameterSet params, std::optional<ManifoldFn> m0,
                               std::optional<FastJacFn> jac_y_g0)
    : n_(n), m_(m), f0_(std::move(f0)), g0_(std::move(g0)),
      params_(std::move(params)), m0_(std::move(m0)), jac_(std::move(jac_y_g0)) {
  if (n_ < 1 || m_ < 1)
    throw ValidationError("slow-fast system needs n >= 1 and m >= 1");
  if (!f0_ || !g0_) throw ValidationError("f0 and g0 evaluators are required");
}

Vec SlowFastSystem::m0(const Vec& x) const {
  if (!m0_)
    throw UnsupportedOperationError("system has no analytic slow-manifold hook");
  return (*m0_)(x);
}

State SlowFastSystem::eval_slow_time(const State& s, double eps) const {
  if (!(eps > 0.0))
    throw DegenerateTimescaleError("slow-time derivative requires eps > 0");
  State d;
  d.x = f0_(s.x, s.y, eps);
  d.y = g0_(s.x, s.y, eps) / eps;
  return d;
}

State SlowFastSystem::eval_fast_time(const State& s, double eps) const {
  if (eps < 0.0)
    throw DegenerateTimescaleError("fast-time derivative requires eps >= 0");
  State d;
  if (eps == 0.0)
    d.x = Vec::Zero(n_);
  else
    d.x = eps * f0_(s.x, s.y, eps);
  d.y = g0_(s.x, s.y, eps);
  return d;
}

State SlowFastSystem::to_deviation(const State& s) const {
  State out;
  out.x = s.x;
  out.y = s.y - m0(s.x);
  return out;
}

State SlowFastSystem::from_deviation(const State& s) const {
  State out;
  out.x = s.x;
  out.y = s.y + m0(s.x);
  return out;
}

Mat SlowFastSystem::jacobian_fast(const Vec& x, const Vec& y, double eps) const {
  if (jac_) return (*jac_)(x, y, eps);
  Mat J(m_, m_);
  Vec yp = y, ym = y;
  for (int j = 0; j < m_; ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(y[j]));
    yp[j] = y[j] + h;
    ym[j] = y[j] - h;
    Vec gp = g0_(x, yp, eps);
    Vec gm = g0_(x, ym, eps);
    if (!all_finite(gp) || !all_finite(gm))
      throw Error("non-finite g0 evaluation in finite-difference Jacobian");
    J.col(j) = (gp - gm) / (2.0 * h);
    yp[j] = y[j];
    ym[j] = y[j];
  }
  return J;
}

Vec SlowFastSystem::pack(const State& s) const {
  Vec v(n_ + m_);
  v.head(n_) = s.x;
  v.tail(m_) = s.y;
  return v;
}

State SlowFastSystem::unpack(const Vec& v) const {
  State s;
  s.x = v.head(n_);
  s.y = v.tail(m_);
  return s;
}

} // namespace slowfast
