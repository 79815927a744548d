#ifndef SLOWFAST_NEWTON_HPP
#define SLOWFAST_NEWTON_HPP

#include <functional>
#include <optional>

#include "slowfast/types.hpp"

namespace slowfast {

using VecFn = std::function<Vec(const Vec&)>;
using VecJacFn = std::function<Mat(const Vec&)>;

struct NewtonConfig {
  double tol = 1e-12;  ///< residual infinity-norm target
  int max_iter = 50;
  double min_damping = 1.0 / 1024.0;
};

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  bool converged = false;
  bool singular = false;  ///< Jacobian (numerically) singular at the solution
  int iterations = 0;
};

/// Damped Newton with residual-norm backtracking. Jacobian from the hook
/// when given, otherwise central finite differences.
NewtonResult damped_newton(const VecFn& F, const std::optional<VecJacFn>& jac,
                           const Vec& x0, const NewtonConfig& cfg = {});

/// Central finite-difference Jacobian of F, column step
/// h = max(1e-7, 1e-7*|x_j|).
Mat fd_jacobian_of(const VecFn& F, const Vec& x);

} // namespace slowfast

#endif
