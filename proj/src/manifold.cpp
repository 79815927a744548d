#include "slowfast/manifold.hpp"

#include <cmath>

#include "slowfast/newton.hpp"

namespace slowfast {

namespace {

/// Least squares fit y = a*x + b; returns {a, b}.
std::pair<double, double> fit_line(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double a = (n * sxy - sx * sy) / denom;
  const double b = (sy - a * sx) / n;
  return {a, b};
}

} // namespace

SlowManifoldSolver::SlowManifoldSolver(SlowFastSystem sys, double newton_tol,
                                       int max_iterations, ManifoldSeeding seeding)
    : sys_(std::move(sys)), tol_(newton_tol), max_iter_(max_iterations),
      seeding_(seeding) {
  if (!(tol_ > 0.0)) throw ValidationError("Newton tolerance must be positive");
  if (max_iter_ < 1) throw ValidationError("Newton needs max_iterations >= 1");
}

Vec SlowManifoldSolver::newton_from(const Vec& x, const Vec& seed) const {
  VecFn F = [&](const Vec& y) { return sys_.g0(x, y, 0.0); };
  VecJacFn J = [&](const Vec& y) { return sys_.jacobian_fast(x, y, 0.0); };
  NewtonConfig cfg;
  cfg.tol = tol_;
  cfg.max_iter = max_iter_;
  NewtonResult res = damped_newton(F, J, seed, cfg);
  if (!res.converged)
    throw NoConvergenceError("manifold Newton solve stalled at residual " +
                                 std::to_string(res.residual),
                             res.x);
  return res.x;
}

Vec SlowManifoldSolver::solve_m0(const Vec& x, const Vec& seed) const {
  return newton_from(x, seed);
}

Vec SlowManifoldSolver::solve_m0(const Vec& x) const {
  switch (seeding_) {
    case ManifoldSeeding::AnalyticHook:
      return newton_from(x, sys_.m0(x));
    case ManifoldSeeding::FromSeed:
      throw UnsupportedOperationError(
          "seeded strategy requires solve_m0(x, seed)");
    case ManifoldSeeding::FastRelaxation:
    default: {
      // frozen-x fast flow from the origin of the fast block; a loose
      // relaxation is enough since Newton polishes afterwards
      OdeFn frozen = [&](double, const Vec& y, Vec& dy) {
        dy = sys_.g0(x, y, 0.0);
      };
      IntegratorConfig cfg;
      cfg.rtol = 1e-6;
      cfg.atol = 1e-8;
      Trajectory tr = integrate(frozen, Vec::Zero(sys_.m()), 0.0, 50.0, cfg);
      return newton_from(x, tr.final_state());
    }
  }
}

Vec manifold_first_order_term(const SlowFastSystem& sys, const Vec& x) {
  const Vec y0 = sys.m0(x);
  const Mat B = sys.jacobian_fast(x, y0, 0.0);

  // D_x m0 by central differences of the hook
  Mat Dxm0(sys.m(), sys.n());
  Vec xp = x, xm = x;
  for (int j = 0; j < sys.n(); ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    Dxm0.col(j) = (sys.m0(xp) - sys.m0(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }

  const Vec f0 = sys.f0(x, y0, 0.0);
  const double he = 1e-6;
  const Vec dg_deps = (sys.g0(x, y0, he) - sys.g0(x, y0, -he)) / (2.0 * he);

  Eigen::FullPivLU<Mat> lu(B);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SingularJacobianError(
        "fast Jacobian singular at the requested slow point");
  return lu.solve(Dxm0 * f0 - dg_deps);
}

Vec first_order_manifold(const SlowFastSystem& sys, const Vec& x, double eps) {
  if (eps == 0.0) return sys.m0(x);
  return sys.m0(x) + eps * manifold_first_order_term(sys, x);
}

RelaxResult relax_to_manifold(const SlowFastSystem& sys, const Vec& x, double eps,
                              const IntegratorConfig& cfg, double mu,
                              const EpsPolytope* domain) {
  if (!(eps > 0.0))
    throw DegenerateTimescaleError("relaxation requires eps > 0");
  if (!(mu > 0.0)) throw ValidationError("relaxation requires mu > 0");
  const double tau_bl = 20.0 / mu;

  State s0;
  s0.x = x;
  s0.y = sys.m0(x);
  IntegrateOptions opts;
  opts.domain = domain;
  opts.domain_eps = eps;
  Trajectory tr =
      integrate(fast_time_ode(sys, eps), sys.pack(s0), 0.0, tau_bl, cfg, opts);
  if (tr.status == TrajStatus::LeftDomain)
    throw LeftDomainError("boundary-layer relaxation left the domain");
  if (tr.status != TrajStatus::Completed)
    throw Error("boundary-layer relaxation failed: " + to_string(tr.status));

  State sf = sys.unpack(tr.final_state());
  RelaxResult res;
  res.x_final = sf.x;
  res.y_final = sf.y;
  res.slow_drift = (sf.x - x).norm();
  res.tau_horizon = tau_bl;
  return res;
}

ManifoldErrorReport manifold_error_scaling(const SlowFastSystem& sys,
                                           const std::vector<double>& eps_list,
                                           const std::vector<Vec>& x_samples,
                                           const IntegratorConfig& cfg, double mu) {
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ValidationError("eps list must be strictly decreasing");
  if (x_samples.empty()) throw ValidationError("need at least one slow sample");

  ManifoldErrorReport rep;
  rep.eps_list = eps_list;
  for (double eps : eps_list) {
    double worst = 0.0;
    for (const Vec& x : x_samples) {
      RelaxResult r = relax_to_manifold(sys, x, eps, cfg, mu);
      const Vec err = r.y_final - sys.m0(r.x_final);
      worst = std::max(worst, err.lpNorm<Eigen::Infinity>());
    }
    rep.sup_errors.push_back(worst);
  }
  if (eps_list.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      if (rep.sup_errors[i] <= 0.0) continue;
      lx.push_back(std::log(eps_list[i]));
      ly.push_back(std::log(rep.sup_errors[i]));
    }
    if (lx.size() >= 2) {
      auto [a, b] = fit_line(lx, ly);
      rep.slope = a;
      rep.intercept = b;
      rep.slope_defined = true;
    }
  }
  return rep;
}

PhaseTrackingReport asymptotic_phase(const SlowFastSystem& sys, const State& s0,
                                     double eps, const IntegratorConfig& cfg,
                                     const PhaseTrackingOptions& opts) {
  if (!(eps > 0.0))
    throw DegenerateTimescaleError("phase tracking requires eps > 0");
  if (!(opts.mu > 0.0)) throw ValidationError("phase tracking requires mu > 0");
  const double tau_end = opts.horizon_factor / opts.mu;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(opts.n_output));
  for (int i = 0; i <= opts.n_output; ++i)
    out.push_back(tau_end * static_cast<double>(i) /
                  static_cast<double>(opts.n_output));

  IntegrateOptions iopt;
  iopt.output_times = out;
  Trajectory tr =
      integrate(fast_time_ode(sys, eps), sys.pack(s0), 0.0, tau_end, cfg, iopt);
  if (tr.status != TrajStatus::Completed)
    throw Error("phase-tracking integration failed: " + to_string(tr.status));

  PhaseTrackingReport rep;
  rep.used_correction = opts.use_first_order_correction;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    State s = sys.unpack(tr.states[i]);
    Vec target = rep.used_correction ? first_order_manifold(sys, s.x, eps)
                                     : sys.m0(s.x);
    rep.times.push_back(tr.times[i]);
    rep.distances.push_back((s.y - target).norm());
  }
  rep.initial_distance = rep.distances.front();
  rep.final_distance = rep.distances.back();

  // fit window: above integrator noise and above the terminal plateau
  double dmin = rep.distances.front();
  for (double d : rep.distances) dmin = std::min(dmin, d);
  rep.fit_floor = std::max(100.0 * cfg.atol, 3.0 * dmin);
  std::vector<double> ft, fd;
  for (std::size_t i = 0; i < rep.distances.size(); ++i) {
    if (rep.distances[i] > rep.fit_floor) {
      ft.push_back(rep.times[i]);
      fd.push_back(std::log(rep.distances[i]));
    }
  }
  if (ft.size() >= 5) {
    auto [a, b] = fit_line(ft, fd);
    (void)b;
    rep.fitted_rate = -a;
    rep.rate_defined = true;
  }
  return rep;
}

double estimate_mu(const SlowFastSystem& sys, const std::vector<Vec>& x_samples) {
  if (x_samples.empty()) throw ValidationError("need at least one slow sample");
  double mu = std::numeric_limits<double>::infinity();
  for (const Vec& x : x_samples) {
    const Mat B = sys.jacobian_fast(x, sys.m0(x), 0.0);
    Eigen::EigenSolver<Mat> es(B, /*computeEigenvectors=*/false);
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      max_re = std::max(max_re, es.eigenvalues()[i].real());
    mu = std::min(mu, -max_re);
  }
  return mu;
}

} // namespace slowfast
