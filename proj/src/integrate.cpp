#include "slowfast/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace slowfast {

std::string to_string(TrajStatus s) {
  switch (s) {
    case TrajStatus::Completed: return "completed";
    case TrajStatus::LeftDomain: return "left-domain";
    case TrajStatus::StepFailure: return "step-failure";
    case TrajStatus::MaxSteps: return "max-steps";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || rtol > 1e-2)
    throw ValidationError("rtol must lie in (0, 1e-2]");
  if (!(atol > 0.0)) throw ValidationError("atol must be positive");
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (h_init < 0.0 || h_max < 0.0)
    throw ValidationError("steps must be nonnegative");
}

Mat fd_jacobian(const OdeFn& field, double t, const Vec& v) {
  const auto n = v.size();
  Mat J(n, n);
  Vec vp = v, vm = v, fp(n), fm(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(v[j]));
    vp[j] = v[j] + h;
    vm[j] = v[j] - h;
    field(t, vp, fp);
    field(t, vm, fm);
    J.col(j) = (fp - fm) / (2.0 * h);
    vp[j] = v[j];
    vm[j] = v[j];
  }
  return J;
}

namespace {

double error_norm(const Vec& err, const Vec& y, const Vec& y_new, double atol,
                  double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

class Stepper {
public:
  virtual ~Stepper() = default;
  /// One trial step of size h from (t, y); fills y_new and returns the
  /// weighted error norm (accept when <= 1). May cache work tied to (t, y);
  /// the cache survives rejected retries at the same state.
  virtual double attempt(double t, const Vec& y, double h, Vec& y_new) = 0;
  virtual void accepted() = 0;
  /// Exponent q of the step controller factor err^(-1/q).
  virtual double control_order() const = 0;
};

/// Dormand-Prince 5(4) with the first-same-as-last economization.
class Dopri5 : public Stepper {
public:
  Dopri5(OdeFn f, double atol, double rtol)
      : f_(std::move(f)), atol_(atol), rtol_(rtol) {}

  double attempt(double t, const Vec& y, double h, Vec& y_new) override {
    const auto n = y.size();
    if (!start_valid_) {
      k1_.resize(n);
      f_(t, y, k1_);
      start_valid_ = true;
    }
    Vec k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n);
    tmp = y + h * (a21 * k1_);
    f_(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1_ + a32 * k2);
    f_(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1_ + a42 * k2 + a43 * k3);
    f_(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4);
    f_(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f_(t + h, tmp, k6);
    y_new = y + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7_.resize(n);
    f_(t + h, y_new, k7_);
    Vec err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7_);
    if (!all_finite(y_new) || !all_finite(err))
      return std::numeric_limits<double>::infinity();
    return error_norm(err, y, y_new, atol_, rtol_);
  }

  void accepted() override { k1_ = k7_; }
  double control_order() const override { return 5.0; }

private:
  OdeFn f_;
  double atol_, rtol_;
  Vec k1_, k7_;
  bool start_valid_ = false;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

/// L-stable linearly implicit Rosenbrock pair of order 2(3) (the classic
/// ode23s scheme): one Jacobian per step, shared by the three stages and by
/// rejected retries at the same state.
class Rosenbrock23 : public Stepper {
public:
  Rosenbrock23(OdeFn f, OdeJacFn jac, double atol, double rtol)
      : f_(std::move(f)), jac_(std::move(jac)), atol_(atol), rtol_(rtol) {}

  double attempt(double t, const Vec& y, double h, Vec& y_new) override {
    const auto n = y.size();
    if (!start_valid_) {
      f0_.resize(n);
      f_(t, y, f0_);
      if (jac_)
        jac_(t, y, J_);
      else
        J_ = fd_jacobian(f_, t, y);
      // df/dt by forward difference; exactly zero for autonomous fields
      const double dt = std::sqrt(std::numeric_limits<double>::epsilon()) *
                        std::max(1.0, std::abs(t));
      Vec ft(n);
      f_(t + dt, y, ft);
      T_ = (ft - f0_) / dt;
      start_valid_ = true;
      lu_h_ = -1.0;
    }
    if (h != lu_h_) {
      Mat W = Mat::Identity(J_.rows(), J_.cols()) - (h * d) * J_;
      lu_.compute(W);
      lu_h_ = h;
    }
    Vec k1 = lu_.solve(f0_ + (h * d) * T_);
    Vec f1(n);
    f_(t + 0.5 * h, y + (0.5 * h) * k1, f1);
    Vec k2 = lu_.solve(f1 - k1) + k1;
    y_new = y + h * k2;
    Vec f2(n);
    f_(t + h, y_new, f2);
    Vec k3 = lu_.solve(f2 - e32 * (k2 - f1) - 2.0 * (k1 - f0_) + (h * d) * T_);
    Vec err = (h / 6.0) * (k1 - 2.0 * k2 + k3);
    if (!all_finite(y_new) || !all_finite(err))
      return std::numeric_limits<double>::infinity();
    return error_norm(err, y, y_new, atol_, rtol_);
  }

  void accepted() override { start_valid_ = false; }
  double control_order() const override { return 3.0; }

private:
  OdeFn f_;
  OdeJacFn jac_;
  double atol_, rtol_;
  Vec f0_, T_;
  Mat J_;
  Eigen::PartialPivLU<Mat> lu_;
  double lu_h_ = -1.0;
  bool start_valid_ = false;

  static inline const double d = 1.0 / (2.0 + std::sqrt(2.0));
  static inline const double e32 = 6.0 + std::sqrt(2.0);
};

std::unique_ptr<Stepper> make_stepper(const OdeFn& field, const OdeJacFn& jac,
                                      const IntegratorConfig& cfg) {
  if (cfg.method == Method::LinearlyImplicitStiff)
    return std::make_unique<Rosenbrock23>(field, jac, cfg.atol, cfg.rtol);
  return std::make_unique<Dopri5>(field, cfg.atol, cfg.rtol);
}

double initial_step(const OdeFn& field, const Vec& y0, double t0, double span,
                    const IntegratorConfig& cfg, double order) {
  if (cfg.h_init > 0.0) return std::min(cfg.h_init, span);
  const auto n = y0.size();
  Vec f0(n);
  field(t0, y0, f0);
  double d0 = 0.0, d1 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1 = std::sqrt(d1 / static_cast<double>(n));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vec y1 = y0 + h0 * f0, f1(n);
  field(t0 + h0, y1, f1);
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y0[i]);
    const double r = (f1[i] - f0[i]) / sc;
    d2 += r * r;
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
  double h1;
  const double dm = std::max(d1, d2);
  if (dm <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / dm, 1.0 / order);
  double h = std::min({100.0 * h0, h1, span});
  if (cfg.h_max > 0.0) h = std::min(h, cfg.h_max);
  return h;
}

double min_step(double t) {
  return 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
}

/// Core driver shared by all integration entry points. `on_accept` runs after
/// every accepted step with (t_prev, y_prev, t_new, y_new) and may return
/// false to stop early. With `hit_times` the step size is clipped so those
/// times are hit exactly.
template <typename OnAccept>
TrajStatus drive(Stepper& st, const Vec& v0, double t0, double t1, double h0,
                 const IntegratorConfig& cfg, long& accepted, long& rejected,
                 const std::vector<double>* hit_times, OnAccept&& on_accept) {
  double t = t0;
  Vec y = v0;
  double h = h0;
  std::size_t hit_idx = 0;
  const double t_eps = 1e-14 * std::max(1.0, std::abs(t1));
  while (t < t1 - t_eps) {
    if (accepted + rejected >= cfg.max_steps) return TrajStatus::MaxSteps;
    if (cfg.h_max > 0.0) h = std::min(h, cfg.h_max);
    double target = t1;
    if (hit_times) {
      while (hit_idx < hit_times->size() &&
             (*hit_times)[hit_idx] <= t + min_step(t))
        ++hit_idx;
      if (hit_idx < hit_times->size())
        target = std::min(target, (*hit_times)[hit_idx]);
    }
    bool clipped = false;
    if (t + h >= target) {
      h = target - t;
      clipped = true;
    }
    Vec y_new;
    const double err = st.attempt(t, y, h, y_new);
    if (err <= 1.0) {
      const double t_new = clipped ? target : t + h;
      st.accepted();
      ++accepted;
      if (!on_accept(t, y, t_new, y_new)) return TrajStatus::Completed;
      t = t_new;
      y = std::move(y_new);
      if (!clipped) {
        const double f =
            err > 0.0 ? 0.9 * std::pow(err, -1.0 / st.control_order()) : 5.0;
        h *= std::clamp(f, 0.2, 5.0);
      }
    } else {
      ++rejected;
      const double f = std::isfinite(err)
                           ? 0.9 * std::pow(err, -1.0 / st.control_order())
                           : 0.1;
      h *= std::clamp(f, 0.1, 0.9);
      if (h < min_step(t)) return TrajStatus::StepFailure;
    }
  }
  return TrajStatus::Completed;
}

} // namespace

Trajectory integrate(const OdeFn& field, const Vec& v0, double t0, double t1,
                     const IntegratorConfig& cfg, const IntegrateOptions& opts) {
  cfg.validate();
  if (!all_finite(v0)) throw InvalidStateError("initial state is not finite");
  if (!(t0 < t1)) throw ValidationError("integration needs t_start < t_end");
  for (std::size_t i = 1; i < opts.output_times.size(); ++i)
    if (!(opts.output_times[i] > opts.output_times[i - 1]))
      throw ValidationError("output times must be strictly increasing");

  Trajectory traj;
  const bool dense = !opts.output_times.empty();
  std::size_t out_idx = 0;
  auto emit = [&](double t, const Vec& v) {
    traj.times.push_back(t);
    traj.states.push_back(v);
  };
  if (!dense) {
    emit(t0, v0);
  } else {
    while (out_idx < opts.output_times.size() && opts.output_times[out_idx] < t0)
      ++out_idx;
    if (out_idx < opts.output_times.size() && opts.output_times[out_idx] == t0) {
      emit(t0, v0);
      ++out_idx;
    }
  }

  if (opts.domain) {
    auto c0 = opts.domain->contains(v0, opts.domain_eps);
    if (c0.margin < -cfg.domain_exit_slack) {
      traj.status = TrajStatus::LeftDomain;
      if (traj.times.empty()) emit(t0, v0);
      return traj;
    }
  }

  auto stepper = make_stepper(field, opts.jacobian, cfg);
  const double h0 = initial_step(field, v0, t0, t1 - t0, cfg,
                                 stepper->control_order());

  bool left_domain = false;
  bool stopped = false;
  auto on_accept = [&](double t_prev, const Vec& y_prev, double t_new,
                       const Vec& y_new) -> bool {
    double t_cut = t_new;
    Vec boundary;
    const Vec* final_v = &y_new;
    if (opts.domain) {
      auto c = opts.domain->contains(y_new, opts.domain_eps);
      if (c.margin < -cfg.domain_exit_slack) {
        left_domain = true;
        auto c_prev = opts.domain->contains(y_prev, opts.domain_eps);
        if (c_prev.margin > 0.0) {
          // linear interpolation to the zero-margin boundary point
          double lo = 0.0, hi = 1.0;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            Vec vm = y_prev + mid * (y_new - y_prev);
            if (opts.domain->contains(vm, opts.domain_eps).margin >= 0.0)
              lo = mid;
            else
              hi = mid;
          }
          boundary = y_prev + lo * (y_new - y_prev);
          t_cut = t_prev + lo * (t_new - t_prev);
        } else {
          boundary = y_prev;
          t_cut = t_prev;
        }
        final_v = &boundary;
      }
    }
    if (!left_domain && opts.stop_condition && opts.stop_condition(t_new, y_new))
      stopped = true;
    if (!dense) {
      if (left_domain)
        emit(t_cut, *final_v);
      else
        emit(t_new, y_new);
    } else {
      const double tol = 1e-12 * std::max(1.0, std::abs(t_cut));
      while (out_idx < opts.output_times.size() &&
             opts.output_times[out_idx] <= t_cut + tol) {
        const double to = opts.output_times[out_idx];
        const double s =
            std::clamp((to - t_prev) / (t_new - t_prev), 0.0, 1.0);
        emit(to, Vec(y_prev + s * (y_new - y_prev)));
        ++out_idx;
      }
      if ((left_domain || stopped) &&
          (traj.times.empty() || traj.times.back() < t_cut))
        emit(t_cut, *final_v);
    }
    return !left_domain && !stopped;
  };

  TrajStatus status = drive(*stepper, v0, t0, t1, h0, cfg, traj.steps_accepted,
                            traj.steps_rejected, nullptr, on_accept);
  traj.status = left_domain ? TrajStatus::LeftDomain : status;
  if (traj.times.empty()) emit(t0, v0);
  return traj;
}

VariationalResult integrate_variational(const OdeFn& field,
                                        const std::optional<OdeJacFn>& jac,
                                        const Vec& v0, double t0, double t1,
                                        const IntegratorConfig& cfg,
                                        const std::vector<double>& output_times) {
  cfg.validate();
  if (!(t0 < t1)) throw ValidationError("integration needs t_start < t_end");
  const auto n = v0.size();
  const auto n2 = n * n;

  OdeFn aug = [&field, &jac, n](double t, const Vec& w, Vec& dw) {
    const Vec v = w.head(n);
    Vec dv(n);
    field(t, v, dv);
    Mat J;
    if (jac)
      (*jac)(t, v, J);
    else
      J = fd_jacobian(field, t, v);
    Eigen::Map<const Mat> M(w.data() + n, n, n);
    dw.resize(n + n * n);
    dw.head(n) = dv;
    Eigen::Map<Mat>(dw.data() + n, n, n) = J * M;
  };

  Vec w0(n + n2);
  w0.head(n) = v0;
  Eigen::Map<Mat>(w0.data() + n, n, n) = Mat::Identity(n, n);

  std::vector<double> hits = output_times;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] < t0 || hits[i] > t1)
      throw ValidationError("variational output times must lie in [t0, t1]");
    if (i > 0 && !(hits[i] > hits[i - 1]))
      throw ValidationError("output times must be strictly increasing");
  }

  VariationalResult res;
  auto record = [&](double t, const Vec& w) {
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(w.head(n));
    res.flow_jacobians.push_back(Eigen::Map<const Mat>(w.data() + n, n, n));
  };

  const bool dense = !hits.empty();
  std::size_t out_idx = 0;
  if (!dense) {
    record(t0, w0);
  } else if (hits[0] == t0) {
    record(t0, w0);
    ++out_idx;
  }

  auto stepper = make_stepper(aug, nullptr, cfg);
  const double h0 = initial_step(aug, w0, t0, t1 - t0, cfg,
                                 stepper->control_order());

  auto on_accept = [&](double, const Vec&, double t_new, const Vec& w_new) -> bool {
    if (!dense) {
      record(t_new, w_new);
    } else {
      // the driver clips steps so requested times are hit exactly
      while (out_idx < hits.size() &&
             std::abs(hits[out_idx] - t_new) <=
                 1e-12 * std::max(1.0, std::abs(t_new))) {
        record(hits[out_idx], w_new);
        ++out_idx;
      }
    }
    return true;
  };

  res.trajectory.status =
      drive(*stepper, w0, t0, t1, h0, cfg, res.trajectory.steps_accepted,
            res.trajectory.steps_rejected, dense ? &hits : nullptr, on_accept);
  return res;
}

EventResult integrate_with_events(const OdeFn& field, const Vec& v0, double t0,
                                  double t_max, const EventSpec& event,
                                  const IntegratorConfig& cfg, int max_crossings) {
  cfg.validate();
  if (!event.fn) throw ValidationError("event function is required");
  if (!(event.refine_tol > 0.0))
    throw ValidationError("event refinement tolerance must be positive");
  if (max_crossings < 1) throw ValidationError("max_crossings must be >= 1");

  EventResult res;
  res.final_state = v0;
  res.t_end = t0;
  double g_prev = event.fn(v0);

  auto matches = [&](double ga, double gb) {
    const bool up = ga <= 0.0 && gb > 0.0;
    const bool down = ga >= 0.0 && gb < 0.0;
    switch (event.direction) {
      case CrossingDirection::Up: return up;
      case CrossingDirection::Down: return down;
      case CrossingDirection::Both: return up || down;
    }
    return false;
  };

  // error-controlled state at ts+dt, restarted from the step start
  auto sub_state = [&](double ts, const Vec& ys, double dt) -> Vec {
    if (dt <= min_step(ts)) return ys;
    IntegratorConfig sub = cfg;
    sub.h_init = 0.0;
    Trajectory tr = integrate(field, ys, ts, ts + dt, sub);
    return tr.final_state();
  };

  auto stepper = make_stepper(field, nullptr, cfg);
  const double h0 = initial_step(field, v0, t0, t_max - t0, cfg,
                                 stepper->control_order());

  bool done = false;
  auto on_accept = [&](double t_prev, const Vec& y_prev, double t_new,
                       const Vec& y_new) -> bool {
    const double g_new = event.fn(y_new);
    if (matches(g_prev, g_new)) {
      double lo = 0.0, hi = t_new - t_prev;
      double g_lo = g_prev;
      Vec best = y_new;
      double t_best = t_new, g_best = g_new;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        Vec ym = sub_state(t_prev, y_prev, mid);
        const double gm = event.fn(ym);
        if (std::abs(gm) < std::abs(g_best)) {
          g_best = gm;
          best = ym;
          t_best = t_prev + mid;
        }
        if (std::abs(gm) <= event.refine_tol) break;
        if ((gm > 0.0) == (g_lo > 0.0)) {
          lo = mid;
          g_lo = gm;
        } else {
          hi = mid;
        }
        if (hi - lo < min_step(t_prev)) break;
      }
      res.crossings.push_back({t_best, best});
      if (static_cast<int>(res.crossings.size()) >= max_crossings) {
        done = true;
        res.t_end = t_new;
        res.final_state = y_new;
        return false;
      }
    }
    g_prev = g_new;
    res.t_end = t_new;
    res.final_state = y_new;
    return true;
  };

  long acc = 0, rej = 0;
  TrajStatus status =
      drive(*stepper, v0, t0, t_max, h0, cfg, acc, rej, nullptr, on_accept);
  res.status = done ? TrajStatus::Completed : status;
  return res;
}

OdeFn slow_time_ode(const SlowFastSystem& sys, double eps) {
  return [sys, eps](double, const Vec& v, Vec& dv) {
    State d = sys.eval_slow_time(sys.unpack(v), eps);
    dv.resize(v.size());
    dv.head(sys.n()) = d.x;
    dv.tail(sys.m()) = d.y;
  };
}

OdeFn fast_time_ode(const SlowFastSystem& sys, double eps) {
  return [sys, eps](double, const Vec& v, Vec& dv) {
    State d = sys.eval_fast_time(sys.unpack(v), eps);
    dv.resize(v.size());
    dv.head(sys.n()) = d.x;
    dv.tail(sys.m()) = d.y;
  };
}

} // namespace slowfast
