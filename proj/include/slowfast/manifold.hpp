#ifndef SLOWFAST_MANIFOLD_HPP
#define SLOWFAST_MANIFOLD_HPP

#include <vector>

#include "slowfast/integrate.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

enum class ManifoldSeeding { AnalyticHook, FromSeed, FastRelaxation };

/// Newton solver for the critical manifold: given a slow point x, finds the
/// fast point y with g0(x, y, 0) = 0.
class SlowManifoldSolver {
public:
  explicit SlowManifoldSolver(SlowFastSystem sys, double newton_tol = 1e-12,
                              int max_iterations = 50,
                              ManifoldSeeding seeding = ManifoldSeeding::FastRelaxation);

  const SlowFastSystem& system() const { return sys_; }

  /// Solves g0(x, y, 0) = 0 for y. The seed comes from the configured
  /// strategy, or from `seed` when given (continuation from a previous
  /// point). Throws NoConvergenceError carrying the last iterate on failure.
  Vec solve_m0(const Vec& x) const;
  Vec solve_m0(const Vec& x, const Vec& seed) const;

private:
  Vec newton_from(const Vec& x, const Vec& seed) const;

  SlowFastSystem sys_;
  double tol_;
  int max_iter_;
  ManifoldSeeding seeding_;
};

/// First-order slow-manifold term m1 at x: the solution of
///   D_y g0 . m1 = D_x m0 . f0 - d g0 / d eps,
/// all evaluated at (x, m0(x), 0). Throws SingularJacobianError when the
/// fast Jacobian is singular.
Vec manifold_first_order_term(const SlowFastSystem& sys, const Vec& x);

/// m0(x) + eps * m1(x); exactly m0(x) at eps = 0.
Vec first_order_manifold(const SlowFastSystem& sys, const Vec& x, double eps);

struct RelaxResult {
  Vec x_final;
  Vec y_final;
  double slow_drift = 0.0;  ///< |x_final - x_start|, expected O(eps * tau_bl)
  double tau_horizon = 0.0;
};

/// Empirical slow-manifold point: integrates the full system in fast time
/// from (x, m0(x)) over the boundary-layer horizon tau_bl = 20/mu and
/// returns the final fast block together with the drifted slow point.
/// Throws LeftDomainError if a domain is supplied and the trajectory exits.
RelaxResult relax_to_manifold(const SlowFastSystem& sys, const Vec& x, double eps,
                              const IntegratorConfig& cfg, double mu,
                              const EpsPolytope* domain = nullptr);

struct ManifoldErrorReport {
  std::vector<double> eps_list;   ///< strictly decreasing
  std::vector<double> sup_errors; ///< per-eps sup over samples
  double slope = 0.0;
  double intercept = 0.0;
  bool slope_defined = false;     ///< false flags an insufficient-points fit
};

/// Sup-norm distance between the relaxed manifold point and m0, per eps,
/// with an ordinary least-squares slope on the log-log points.
ManifoldErrorReport manifold_error_scaling(const SlowFastSystem& sys,
                                           const std::vector<double>& eps_list,
                                           const std::vector<Vec>& x_samples,
                                           const IntegratorConfig& cfg, double mu);

struct PhaseTrackingOptions {
  double mu = 1.0;
  double horizon_factor = 40.0;  ///< integrate to tau = horizon_factor / mu
  int n_output = 200;
  /// Track distance to m0 + eps*m1 instead of m0 (needed to see decay past
  /// the O(eps) offset of the true invariant manifold).
  bool use_first_order_correction = true;
};

struct PhaseTrackingReport {
  std::vector<double> times;
  std::vector<double> distances;
  double fitted_rate = 0.0;
  bool rate_defined = false;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  bool used_correction = false;
  double fit_floor = 0.0;  ///< distances at or below this were excluded
};

/// Tracks dist(tau) = |y(tau) - m(x(tau))| along a fast-time integration of
/// the full system and fits an exponential decay rate by least squares on
/// log-distance, excluding the integrator-noise floor.
PhaseTrackingReport asymptotic_phase(const SlowFastSystem& sys, const State& s0,
                                     double eps, const IntegratorConfig& cfg,
                                     const PhaseTrackingOptions& opts);

/// Spectral attraction margin min over samples of -max Re eig D_y g0 at
/// (x, m0(x), 0). Positive iff the fast Jacobian is Hurwitz at every sample.
double estimate_mu(const SlowFastSystem& sys, const std::vector<Vec>& x_samples);

} // namespace slowfast

#endif
