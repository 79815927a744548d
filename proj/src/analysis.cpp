#include "slowfast/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace slowfast {

std::string to_string(EqClass c) {
  switch (c) {
    case EqClass::StableNode: return "stable-node";
    case EqClass::StableFocus: return "stable-focus";
    case EqClass::Saddle: return "saddle";
    case EqClass::UnstableNode: return "unstable-node";
    case EqClass::UnstableFocus: return "unstable-focus";
    case EqClass::CenterMarginal: return "center-marginal";
    case EqClass::Unclassified: return "unclassified";
  }
  return "unknown";
}

std::string to_string(CycleVerdict v) {
  switch (v) {
    case CycleVerdict::CycleFound: return "cycle-found";
    case CycleVerdict::ConvergedToEquilibrium: return "converged-to-equilibrium";
    case CycleVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<Equilibrium> find_equilibria(
    const FieldFn& field, const std::vector<Vec>& seeds,
    const std::function<bool(const Vec&)>& in_domain,
    const EquilibriumSearchConfig& cfg) {
  std::vector<Equilibrium> roots;
  VecFn F = [&field](const Vec& v) { return field(v); };
  for (const Vec& seed : seeds) {
    NewtonResult nr;
    try {
      nr = damped_newton(F, std::nullopt, seed, cfg.newton);
    } catch (const Error&) {
      continue; // seed wandered outside the field's domain
    }
    if (!nr.converged) continue;
    const double resid = field(nr.x).lpNorm<Eigen::Infinity>();
    if (resid > cfg.residual_accept) continue;
    if (in_domain && !in_domain(nr.x)) continue;
    bool duplicate = false;
    for (const auto& r : roots)
      if ((r.location - nr.x).norm() < cfg.dedupe_radius) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    Equilibrium eq;
    eq.location = nr.x;
    eq.residual = resid;
    eq.degenerate = nr.singular;
    roots.push_back(std::move(eq));
  }
  return roots;
}

void classify(const FieldFn& field, Equilibrium& eq, double threshold) {
  VecFn F = [&field](const Vec& v) { return field(v); };
  Mat J = fd_jacobian_of(F, eq.location);
  Eigen::EigenSolver<Mat> es(J, false);
  eq.eigenvalues.clear();
  bool any_marginal = false, any_pos = false, any_neg = false, any_complex = false;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    eq.eigenvalues.push_back(ev);
    if (std::abs(ev.real()) < threshold)
      any_marginal = true;
    else if (ev.real() > 0.0)
      any_pos = true;
    else
      any_neg = true;
    if (std::abs(ev.imag()) > threshold) any_complex = true;
  }
  if (any_marginal)
    eq.classification = EqClass::CenterMarginal;
  else if (any_pos && any_neg)
    eq.classification = EqClass::Saddle;
  else if (any_pos)
    eq.classification = any_complex ? EqClass::UnstableFocus : EqClass::UnstableNode;
  else
    eq.classification = any_complex ? EqClass::StableFocus : EqClass::StableNode;
}

std::vector<Vec> nullcline_scan(const FieldFn& planar_field, const Vec& lo,
                                const Vec& hi, int resolution) {
  if (resolution < 2) throw ValidationError("scan needs resolution >= 2");
  const int n = resolution + 1;
  std::vector<double> f1(static_cast<std::size_t>(n) * n),
      f2(static_cast<std::size_t>(n) * n);
  std::vector<char> ok(static_cast<std::size_t>(n) * n, 0);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec x(2);
      x[0] = lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / resolution;
      x[1] = lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / resolution;
      try {
        Vec f = planar_field(x);
        if (all_finite(f)) {
          f1[idx(i, j)] = f[0];
          f2[idx(i, j)] = f[1];
          ok[idx(i, j)] = 1;
        }
      } catch (const DomainError&) {
        // corner outside the field's domain; cell skipped
      }
    }
  }
  auto changes_sign = [](double a, double b, double c, double d) {
    const double mn = std::min({a, b, c, d});
    const double mx = std::max({a, b, c, d});
    return mn < 0.0 ? mx >= 0.0 : (mn == 0.0 && mx > 0.0);
  };
  std::vector<Vec> out;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      if (!(ok[idx(i, j)] && ok[idx(i + 1, j)] && ok[idx(i, j + 1)] &&
            ok[idx(i + 1, j + 1)]))
        continue;
      const bool c1 = changes_sign(f1[idx(i, j)], f1[idx(i + 1, j)],
                                   f1[idx(i, j + 1)], f1[idx(i + 1, j + 1)]);
      const bool c2 = changes_sign(f2[idx(i, j)], f2[idx(i + 1, j)],
                                   f2[idx(i, j + 1)], f2[idx(i + 1, j + 1)]);
      if (c1 && c2) {
        Vec center(2);
        center[0] = lo[0] + (hi[0] - lo[0]) * (i + 0.5) / resolution;
        center[1] = lo[1] + (hi[1] - lo[1]) * (j + 0.5) / resolution;
        out.push_back(center);
      }
    }
  }
  return out;
}

std::vector<Equilibrium> nullcline_equilibria(
    const FieldFn& planar_field, const Vec& lo, const Vec& hi, int resolution,
    const std::function<bool(const Vec&)>& in_domain,
    const EquilibriumSearchConfig& cfg) {
  auto seeds = nullcline_scan(planar_field, lo, hi, resolution);
  return find_equilibria(planar_field, seeds, in_domain, cfg);
}

CensusReport convergence_census(const SlowFastSystem& sys, const EpsPolytope& dom,
                                double eps, const std::vector<Equilibrium>& eqs,
                                const CensusConfig& cfg) {
  if (cfg.n_samples < 1) throw ValidationError("census needs n_samples >= 1");
  if (eqs.empty()) throw ValidationError("census needs a nonempty equilibrium list");
  dom.require_valid_eps(eps);

  CensusReport rep;
  rep.eps = eps;
  rep.n_samples = cfg.n_samples;
  rep.horizon = cfg.horizon;
  rep.tol = cfg.tol;
  rep.rtol = cfg.integ.rtol;
  rep.atol = cfg.integ.atol;
  rep.seed = cfg.seed;
  rep.basin_tallies.assign(eqs.size(), 0);
  for (const auto& e : eqs) rep.equilibria.push_back(e.location);
  rep.samples.resize(static_cast<std::size_t>(cfg.n_samples));

  const OdeFn field = slow_time_ode(sys, eps);
  const double eq_radius = cfg.eq_radius_factor * cfg.tol;

  auto nearest = [&](const Vec& v) -> std::pair<int, double> {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eqs.size(); ++k) {
      const double d = (v - eqs[k].location).norm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(k);
      }
    }
    return {best, bd};
  };
  auto is_settled = [&](const Vec& v) {
    Vec dv(v.size());
    field(0.0, v, dv);
    if (!(dv.lpNorm<Eigen::Infinity>() < cfg.tol)) return false;
    return nearest(v).second < eq_radius;
  };

  std::atomic<long> total_attempts{0};

  auto run_sample = [&](int i) {
    CensusSample s;
    s.index = i;
    std::uint64_t rng = stream_seed(cfg.seed, static_cast<std::uint64_t>(i));
    int attempts = 0;
    s.initial = dom.sample(eps, rng, &attempts);
    total_attempts += attempts;

    IntegrateOptions opts;
    opts.stop_condition = [&](double, const Vec& v) { return is_settled(v); };
    Trajectory tr;
    try {
      tr = integrate(field, s.initial, 0.0, cfg.horizon, cfg.integ, opts);
      s.terminal = tr.final_state();
      if (is_settled(s.terminal)) {
        s.converged = true;
        s.equilibrium = nearest(s.terminal).first;
      } else if (tr.status != TrajStatus::Completed) {
        s.reason = to_string(tr.status);
      } else {
        s.reason = "horizon";
      }
    } catch (const Error& e) {
      s.terminal = s.initial;
      s.reason = std::string("integration-error: ") + e.what();
    }
    rep.samples[static_cast<std::size_t>(i)] = std::move(s);
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (int i = 0; i < cfg.n_samples; ++i) run_sample(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.n_samples; i += workers) run_sample(i);
      });
    for (auto& th : pool) th.join();
  }

  long attempts = total_attempts.load();
  rep.acceptance_rate =
      attempts > 0 ? static_cast<double>(cfg.n_samples) / attempts : 0.0;
  for (const auto& s : rep.samples) {
    if (s.converged) {
      ++rep.converged;
      ++rep.basin_tallies[static_cast<std::size_t>(s.equilibrium)];
    } else {
      rep.non_converged.push_back(s.index);
    }
  }
  return rep;
}

std::vector<Equilibrium> lifted_equilibria(const models::ScaledFutileCycle& model,
                                           double eps, int scan_resolution) {
  const SlowFastSystem& sys = model.system;
  FieldFn reduced = [&sys](const Vec& x) { return sys.f0(x, sys.m0(x), 0.0); };
  Vec lo = Vec::Zero(2), hi = Vec::Constant(2, model.bound);
  const double b = model.bound;
  auto in_K0 = [b](const Vec& x) {
    return x[0] >= -1e-9 && x[1] >= -1e-9 && x[0] + x[1] <= b + 1e-9;
  };
  auto red_roots = nullcline_equilibria(reduced, lo, hi, scan_resolution, in_K0);

  // lift through m0 and refine on the stationarity map (f0, g0) at this eps
  FieldFn stationarity = [&sys, eps](const Vec& v) {
    Vec x = v.head(sys.n()), y = v.tail(sys.m());
    Vec out(sys.n() + sys.m());
    out.head(sys.n()) = sys.f0(x, y, eps);
    out.tail(sys.m()) = sys.g0(x, y, eps);
    return out;
  };
  std::vector<Vec> seeds;
  for (const auto& r : red_roots) {
    Vec v(sys.n() + sys.m());
    v.head(sys.n()) = r.location;
    v.tail(sys.m()) = sys.m0(r.location);
    seeds.push_back(v);
  }
  auto full = find_equilibria(stationarity, seeds);
  FieldFn slow_field = [&sys, eps](const Vec& v) {
    State d = sys.eval_slow_time(sys.unpack(v), eps);
    Vec out(v.size());
    out.head(sys.n()) = d.x;
    out.tail(sys.m()) = d.y;
    return out;
  };
  for (auto& eq : full) classify(slow_field, eq);
  return full;
}

LimitCycleReport detect_limit_cycle(const FieldFn& field, const Vec& s0,
                                    const EventSpec& section,
                                    const std::string& section_desc,
                                    const LimitCycleConfig& cfg,
                                    const std::vector<Equilibrium>& eqs) {
  LimitCycleReport rep;
  rep.section = section_desc;
  OdeFn ode = [&field](double, const Vec& v, Vec& dv) { dv = field(v); };
  EventResult ev = integrate_with_events(ode, s0, 0.0, cfg.horizon, section,
                                         cfg.integ, cfg.max_crossings);
  rep.crossings = ev.crossings;

  auto near_equilibrium = [&](const Vec& v) {
    for (const auto& e : eqs)
      if ((v - e.location).norm() < cfg.eq_exclusion) return true;
    return false;
  };

  const std::size_t nc = rep.crossings.size();
  if (nc >= 5 && static_cast<int>(nc) >= cfg.min_crossings) {
    double worst = 0.0;
    for (std::size_t i = nc - 5; i < nc; ++i)
      for (std::size_t j = i + 1; j < nc; ++j)
        worst = std::max(worst,
                         (rep.crossings[i].state - rep.crossings[j].state).norm());
    if (worst < cfg.crossing_tol) {
      rep.fixed_point = rep.crossings.back().state;
      if (near_equilibrium(rep.fixed_point)) {
        rep.verdict = CycleVerdict::ConvergedToEquilibrium;
        return rep;
      }
      double period = 0.0;
      for (std::size_t i = nc - 4; i < nc; ++i)
        period += rep.crossings[i].t - rep.crossings[i - 1].t;
      rep.period = period / 4.0;

      // one loop from the fixed point for the amplitude
      Trajectory loop =
          integrate(ode, rep.fixed_point, 0.0, rep.period, cfg.integ);
      Vec ref;
      if (!eqs.empty()) {
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& e : eqs) {
          const double d = (rep.fixed_point - e.location).norm();
          if (d < bd) {
            bd = d;
            ref = e.location;
          }
        }
      } else {
        ref = Vec::Zero(s0.size());
        for (const auto& st : loop.states) ref += st;
        ref /= static_cast<double>(loop.states.size());
      }
      for (const auto& st : loop.states)
        rep.amplitude = std::max(rep.amplitude, (st - ref).norm());
      if (rep.amplitude > 10.0 * cfg.crossing_tol) {
        rep.verdict = CycleVerdict::CycleFound;
        return rep;
      }
    }
  }
  if (near_equilibrium(ev.final_state)) {
    rep.verdict = CycleVerdict::ConvergedToEquilibrium;
    return rep;
  }
  rep.verdict = CycleVerdict::Inconclusive;
  return rep;
}

} // namespace slowfast
