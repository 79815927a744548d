#ifndef SLOWFAST_MODELS_COUNTEREXAMPLE_HPP
#define SLOWFAST_MODELS_COUNTEREXAMPLE_HPP

#include <functional>

#include "slowfast/domain.hpp"
#include "slowfast/monotone.hpp"
#include "slowfast/system.hpp"

namespace slowfast::models {

/// The planar slow-fast family whose unique equilibrium loses stability for
/// large eps:
///
///   dx/dt = gamma(y1) - beta(x),   eps dy1/dt = -d1 y1 - alpha1(x)
///
/// with the cubic/tanh instance beta(x) = x^3/3 - x, alpha1(x) = 2 tanh x,
/// gamma(y) = y, d1 = 1. The box |x| <= a, |y1| <= b1 is forward invariant
/// for every eps > 0 once b1 > M1/d1 (M1 = sup |alpha1| = 2) and
/// beta(a) > N_b = max over the box of gamma = b1.
struct CounterexampleParams {
  double eps = 0.5;
  double a = 0.0;
  double b1 = 0.0;
  static constexpr double d1 = 1.0;
  static constexpr double M1 = 2.0;

  /// b1 = M1/d1 + 1 and the smallest a with beta(a) >= N_b + 1 (root-found).
  static CounterexampleParams with_defaults(double eps);

  void validate() const;
};

double cx_beta(double x);
double cx_beta_prime(double x);
double cx_alpha1(double x);
double cx_gamma(double y1);

struct CounterexampleModel {
  SlowFastSystem system;  ///< n = 1, m = 1
  EpsPolytope domain;     ///< the invariant box, valid for every eps > 0
  CounterexampleParams params;
};

CounterexampleModel counterexample_system(const CounterexampleParams& cp);

struct OriginJacobian {
  Mat J;
  double trace;
  double det;
};

/// Closed-form slow-time Jacobian at the origin: [[1, 1], [-2/eps, -1/eps]],
/// trace 1 - 1/eps, determinant 1/eps.
OriginJacobian counterexample_jacobian_origin(double eps);

/// Slow-time planar field (x, y1) at fixed eps, for equilibrium and
/// limit-cycle analysis.
FieldFn counterexample_planar_field(double eps);

/// Reduced dynamics on the critical manifold: gamma(m0(x)) - beta(x) with
/// m0(x) = -alpha1(x)/d1.
std::function<double(double)> counterexample_reduced_scalar();

} // namespace slowfast::models

#endif
