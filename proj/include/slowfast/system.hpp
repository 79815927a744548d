#ifndef SLOWFAST_SYSTEM_HPP
#define SLOWFAST_SYSTEM_HPP

#include <functional>
#include <optional>

#include "slowfast/types.hpp"

namespace slowfast {

/// Evaluator of one block of the vector field: (x, y, eps) -> vector.
using BlockFn = std::function<Vec(const Vec& x, const Vec& y, double eps)>;
/// Critical-manifold hook: x -> y with g0(x, m0(x), 0) = 0.
using ManifoldFn = std::function<Vec(const Vec& x)>;
/// Analytic fast Jacobian hook: (x, y, eps) -> D_y g0, an m-by-m matrix.
using FastJacFn = std::function<Mat(const Vec& x, const Vec& y, double eps)>;

/// A slow-fast vector field pair
///
///   dx/dt = f0(x, y, eps),   eps dy/dt = g0(x, y, eps)
///
/// with dimensions n (slow) and m (fast), plus optional analytic hooks for
/// the critical manifold m0 and the fast Jacobian D_y g0. Immutable after
/// construction; evaluators must be pure, so instances are safe to share
/// across threads.
class SlowFastSystem {
public:
  SlowFastSystem(int n, int m, BlockFn f0, BlockFn g0, ParameterSet params = {},
                 std::optional<ManifoldFn> m0 = std::nullopt,
                 std::optional<FastJacFn> jac_y_g0 = std::nullopt);

  int n() const { return n_; }
  int m() const { return m_; }
  const ParameterSet& params() const { return params_; }
  bool has_m0() const { return m0_.has_value(); }
  bool has_fast_jacobian() const { return jac_.has_value(); }

  Vec f0(const Vec& x, const Vec& y, double eps) const { return f0_(x, y, eps); }
  Vec g0(const Vec& x, const Vec& y, double eps) const { return g0_(x, y, eps); }

  /// m0 hook; throws UnsupportedOperationError when absent.
  Vec m0(const Vec& x) const;

  /// Derivative in the slow time t: (f0, g0/eps). Requires eps > 0.
  State eval_slow_time(const State& s, double eps) const;

  /// Derivative in the fast time tau = t/eps: (eps*f0, g0). Requires eps >= 0;
  /// at eps = 0 the slow block is exactly zero.
  State eval_fast_time(const State& s, double eps) const;

  /// Deviation coordinates z = y - m0(x); requires the m0 hook.
  State to_deviation(const State& s) const;
  State from_deviation(const State& s) const;

  /// D_y g0 at (x, y, eps): the analytic hook when present, otherwise a
  /// central finite difference with per-column step h = max(1e-6, 1e-6*|y_i|).
  Mat jacobian_fast(const Vec& x, const Vec& y, double eps) const;

  /// Flat-vector helpers used by the integrators: v = [x; y].
  Vec pack(const State& s) const;
  State unpack(const Vec& v) const;

private:
  int n_, m_;
  BlockFn f0_, g0_;
  ParameterSet params_;
  std::optional<ManifoldFn> m0_;
  std::optional<FastJacFn> jac_;
};

} // namespace slowfast

#endif
