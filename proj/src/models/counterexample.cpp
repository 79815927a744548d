#include "slowfast/models/counterexample.hpp"

#include <cmath>
#include <limits>

namespace slowfast::models {

double cx_beta(double x) { return x * x * x / 3.0 - x; }
double cx_beta_prime(double x) { return x * x - 1.0; }
double cx_alpha1(double x) { return 2.0 * std::tanh(x); }
double cx_gamma(double y1) { return y1; }

CounterexampleParams CounterexampleParams::with_defaults(double eps) {
  CounterexampleParams cp;
  cp.eps = eps;
  cp.b1 = M1 / d1 + 1.0;
  // smallest a with beta(a) >= N_b + 1; beta is increasing past x = 1
  const double target = cp.b1 + 1.0;
  double lo = 1.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cx_beta(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  cp.a = hi;
  cp.validate();
  return cp;
}

void CounterexampleParams::validate() const {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(b1 > M1 / d1))
    throw ValidationError("box needs b1 > M1/d1 = " + std::to_string(M1 / d1));
  const double Nb = b1; // max of gamma(y1) = y1 over |y1| <= b1
  if (!(cx_beta(a) > Nb))
    throw ValidationError("box needs beta(a) > N_b = " + std::to_string(Nb));
}

CounterexampleModel counterexample_system(const CounterexampleParams& cp) {
  cp.validate();
  BlockFn f0 = [](const Vec& x, const Vec& y, double) {
    Vec d(1);
    d[0] = cx_gamma(y[0]) - cx_beta(x[0]);
    return d;
  };
  BlockFn g0 = [](const Vec& x, const Vec& y, double) {
    Vec d(1);
    d[0] = -CounterexampleParams::d1 * y[0] - cx_alpha1(x[0]);
    return d;
  };
  ManifoldFn m0 = [](const Vec& x) {
    Vec y(1);
    y[0] = -cx_alpha1(x[0]) / CounterexampleParams::d1;
    return y;
  };
  FastJacFn jac = [](const Vec&, const Vec&, double) {
    Mat J(1, 1);
    J(0, 0) = -CounterexampleParams::d1;
    return J;
  };

  std::vector<EpsAffineRow> rows;
  Vec z2 = Vec::Zero(2);
  auto unit = [](int i, double s) {
    Vec a = Vec::Zero(2);
    a[i] = s;
    return a;
  };
  rows.push_back({unit(0, 1.0), z2, cp.a, 0.0, "x <= a"});
  rows.push_back({unit(0, -1.0), z2, cp.a, 0.0, "x >= -a"});
  rows.push_back({unit(1, 1.0), z2, cp.b1, 0.0, "y1 <= b1"});
  rows.push_back({unit(1, -1.0), z2, cp.b1, 0.0, "y1 >= -b1"});

  Vec lo(2), hi(2), seed(2);
  lo << -cp.a, -cp.b1;
  hi << cp.a, cp.b1;
  seed << 0.0, 0.0;
  EpsPolytope domain(std::move(rows), 0.0,
                     std::numeric_limits<double>::infinity(), lo, hi, seed);

  ParameterSet ps;
  ps.add("eps", cp.eps);
  ps.add("a", cp.a);
  ps.add("b1", cp.b1);

  return CounterexampleModel{SlowFastSystem(1, 1, std::move(f0), std::move(g0),
                                            std::move(ps), std::move(m0),
                                            std::move(jac)),
                             std::move(domain), cp};
}

OriginJacobian counterexample_jacobian_origin(double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  OriginJacobian oj;
  oj.J.resize(2, 2);
  oj.J(0, 0) = 1.0;
  oj.J(0, 1) = 1.0;
  oj.J(1, 0) = -2.0 / eps;
  oj.J(1, 1) = -1.0 / eps;
  oj.trace = 1.0 - 1.0 / eps;
  oj.det = 1.0 / eps;
  return oj;
}

FieldFn counterexample_planar_field(double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  return [eps](const Vec& v) {
    Vec d(2);
    d[0] = cx_gamma(v[1]) - cx_beta(v[0]);
    d[1] = (-CounterexampleParams::d1 * v[1] - cx_alpha1(v[0])) / eps;
    return d;
  };
}

std::function<double(double)> counterexample_reduced_scalar() {
  return [](double x) {
    return cx_gamma(-cx_alpha1(x) / CounterexampleParams::d1) - cx_beta(x);
  };
}

} // namespace slowfast::models
