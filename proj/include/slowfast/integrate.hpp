#ifndef SLOWFAST_INTEGRATE_HPP
#define SLOWFAST_INTEGRATE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/domain.hpp"
#include "slowfast/system.hpp"
#include "slowfast/types.hpp"

namespace slowfast {

/// Autonomous-or-not vector field on flat vectors.
using OdeFn = std::function<void(double t, const Vec& v, Vec& dv)>;
/// Jacobian of the field with respect to the state.
using OdeJacFn = std::function<void(double t, const Vec& v, Mat& J)>;

enum class Method {
  AdaptiveExplicitRK,  ///< embedded Dormand-Prince 5(4) pair
  LinearlyImplicitStiff ///< L-stable Rosenbrock pair, one Jacobian per step
};

enum class TrajStatus { Completed, LeftDomain, StepFailure, MaxSteps };

std::string to_string(TrajStatus s);

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;  ///< 0 means automatic
  double h_max = 0.0;   ///< 0 means unrestricted
  long max_steps = 10000000;
  Method method = Method::AdaptiveExplicitRK;
  /// Domain exit fires when the containment margin drops below -slack,
  /// leaving room for boundary-started trajectories and roundoff.
  double domain_exit_slack = 1e-8;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  TrajStatus status = TrajStatus::Completed;
  long steps_accepted = 0;
  long steps_rejected = 0;

  const Vec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

struct IntegrateOptions {
  const EpsPolytope* domain = nullptr;
  double domain_eps = 0.0;
  /// When nonempty, the trajectory holds linear interpolants at exactly
  /// these times (clipped to the integrated range) instead of every step.
  std::vector<double> output_times;
  /// Optional analytic Jacobian, used by the stiff method; finite
  /// differences otherwise.
  OdeJacFn jacobian;
  /// Checked after every accepted step; returning true ends the run with
  /// status Completed and the current state as the final one.
  std::function<bool(double t, const Vec& v)> stop_condition;
};

/// Adaptive integration of dv/dt = field(t, v) over [t0, t1]. Local error is
/// kept under atol + rtol*|state| per step. With a domain, terminates at the
/// (linearly interpolated) boundary crossing with status LeftDomain.
/// Repeated rejection below the minimal representable step yields status
/// StepFailure rather than an exception.
Trajectory integrate(const OdeFn& field, const Vec& v0, double t0, double t1,
                     const IntegratorConfig& cfg,
                     const IntegrateOptions& opts = {});

struct VariationalResult {
  Trajectory trajectory;
  /// Flow derivative D phi_t at each trajectory time, starting from identity.
  std::vector<Mat> flow_jacobians;
};

/// Integrates the field together with the variational equation
/// M' = J(v(t)) M, M(0) = I. The Jacobian comes from `jac` when given,
/// otherwise central finite differences of the field. Requested output
/// times are hit exactly (the step size is clipped), so the returned
/// matrices carry full integration accuracy.
VariationalResult integrate_variational(const OdeFn& field,
                                        const std::optional<OdeJacFn>& jac,
                                        const Vec& v0, double t0, double t1,
                                        const IntegratorConfig& cfg,
                                        const std::vector<double>& output_times = {});

enum class CrossingDirection { Up, Down, Both };

/// Scalar event function with a crossing direction and a refinement
/// tolerance for the reported crossing.
struct EventSpec {
  std::function<double(const Vec&)> fn;
  CrossingDirection direction = CrossingDirection::Both;
  double refine_tol = 1e-10;
};

struct Crossing {
  double t = 0.0;
  Vec state;
};

struct EventResult {
  std::vector<Crossing> crossings;
  TrajStatus status = TrajStatus::Completed;
  double t_end = 0.0;
  Vec final_state;
};

/// Integrates until `max_crossings` sign changes of the event function have
/// been collected (or t_max / max_steps is hit). Each crossing is refined by
/// bisection, re-integrating from the step start so the reported state is
/// accurate to the integration tolerance, until |event| <= refine_tol.
EventResult integrate_with_events(const OdeFn& field, const Vec& v0, double t0,
                                  double t_max, const EventSpec& event,
                                  const IntegratorConfig& cfg, int max_crossings);

/// Central finite-difference Jacobian of a field, column step
/// h = max(1e-6, 1e-6*|v_j|).
Mat fd_jacobian(const OdeFn& field, double t, const Vec& v);

/// Flat-vector field of a slow-fast system in the slow time t.
OdeFn slow_time_ode(const SlowFastSystem& sys, double eps);
/// Flat-vector field in the fast time tau = t/eps.
OdeFn fast_time_ode(const SlowFastSystem& sys, double eps);

} // namespace slowfast

#endif
