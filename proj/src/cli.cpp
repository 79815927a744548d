#include "slowfast/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "slowfast/analysis.hpp"
#include "slowfast/manifold.hpp"
#include "slowfast/models/registry.hpp"
#include "slowfast/report_io.hpp"

namespace slowfast {

namespace {

using models::CounterexampleParams;
using models::FutileCycleParams;
using models::ModelConfig;

struct CommonOpts {
  std::string model = "futile-cycle";
  std::string params_path;
  std::string out_dir = ".";
  std::optional<double> eps;
  std::uint64_t seed = 0;
  double rtol = 1e-8;
  double atol = 1e-10;
  bool no_timestamp = false;
};

int env_workers() {
  const char* w = std::getenv("SLOWFAST_WORKERS");
  if (!w) return 1;
  const int n = std::atoi(w);
  if (n < 1)
    throw ValidationError("SLOWFAST_WORKERS must be a positive integer");
  return n;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_eps = true) {
  cmd->add_option("--model", o.model, "model key")->capture_default_str();
  cmd->add_option("--params", o.params_path,
                  "JSON parameter file {model, params, eps}");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  if (with_eps) cmd->add_option("--eps", o.eps, "singular parameter");
  cmd->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--rtol", o.rtol, "integrator relative tolerance")
      ->capture_default_str();
  cmd->add_option("--atol", o.atol, "integrator absolute tolerance")
      ->capture_default_str();
  cmd->add_flag("--no-timestamp", o.no_timestamp,
                "omit the timestamp field (byte-stable reports)");
}

ModelConfig resolve_config(const CommonOpts& o) {
  ModelConfig cfg;
  if (!o.params_path.empty()) {
    cfg = models::load_model_config(o.params_path);
    if (cfg.model != o.model && o.model != "futile-cycle")
      throw ValidationError("--model disagrees with the parameter file (" +
                            cfg.model + ")");
    if (!cfg.model.empty()) {
      // the file's model key wins when --model was left at its default
    }
  } else {
    cfg.model = o.model;
  }
  if (o.eps) cfg.eps = *o.eps;
  if (!models::is_known_model(cfg.model))
    throw ValidationError("unknown model: " + cfg.model);
  return cfg;
}

IntegratorConfig integ_for(const CommonOpts& o, double eps) {
  IntegratorConfig ic;
  ic.rtol = o.rtol;
  ic.atol = o.atol;
  // manual stiffness rule: the fast block's spectrum scales like -mu/eps
  ic.method = eps <= 1e-3 ? Method::LinearlyImplicitStiff
                          : Method::AdaptiveExplicitRK;
  ic.validate();
  return ic;
}

njson params_echo(const FutileCycleParams& p) {
  njson j;
  j["k1"] = p.k1;
  j["k_m1"] = p.k_m1;
  j["k2"] = p.k2;
  j["k3"] = p.k3;
  j["k_m3"] = p.k_m3;
  j["k4"] = p.k4;
  j["h1"] = p.h1;
  j["h_m1"] = p.h_m1;
  j["h2"] = p.h2;
  j["h3"] = p.h3;
  j["h_m3"] = p.h_m3;
  j["h4"] = p.h4;
  j["S_tot"] = p.S_tot;
  j["E_tot"] = p.E_tot;
  j["F_tot"] = p.F_tot;
  return j;
}

njson params_echo(const CounterexampleParams& cp) {
  njson j;
  j["eps"] = cp.eps;
  j["a"] = cp.a;
  j["b1"] = cp.b1;
  return j;
}

njson make_meta(const std::string& command, const std::string& model,
                double eps, const CommonOpts& o, njson defaults, njson params) {
  njson meta;
  meta["command"] = command;
  meta["model"] = model;
  meta["eps"] = eps;
  meta["seed"] = o.seed;
  meta["defaults"] = std::move(defaults);
  meta["params"] = std::move(params);
  if (!o.no_timestamp) meta["timestamp"] = utc_timestamp();
  return meta;
}

void write_report(const std::string& dir, const std::string& name,
                  const njson& doc) {
  atomic_write_file(dir + "/" + name, doc.dump(2) + "\n");
}

Vec parse_state(const std::string& csv, Eigen::Index expected) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    try {
      vals.push_back(std::stod(csv.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw ValidationError("malformed --state entry: " +
                            csv.substr(pos, next - pos));
    }
    pos = next + 1;
  }
  if (static_cast<Eigen::Index>(vals.size()) != expected)
    throw ValidationError("--state needs " + std::to_string(expected) +
                          " comma-separated values");
  Vec v(expected);
  for (Eigen::Index i = 0; i < expected; ++i)
    v[i] = vals[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> parse_eps_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

std::vector<Vec> triangle_lattice(double margin, int per_side) {
  std::vector<Vec> pts;
  for (int i = 0; i < per_side; ++i) {
    for (int j = 0; j < per_side; ++j) {
      Vec x(2);
      x[0] = margin + (1.0 - 2.0 * margin) * i / (per_side - 1);
      x[1] = margin + (1.0 - 2.0 * margin) * j / (per_side - 1);
      if (x[0] + x[1] <= 1.0 - margin) pts.push_back(x);
    }
  }
  return pts;
}

// ---- subcommand implementations ----

int run_simulate(const CommonOpts& o, const std::string& state_csv, double t1) {
  ModelConfig cfg = resolve_config(o);
  if (cfg.model == "futile-cycle-mass-action") {
    FutileCycleParams p = models::futile_params_from(cfg);
    auto model = models::futile_cycle_mass_action(p);
    Vec v0(6);
    if (state_csv.empty()) {
      v0 << p.S_tot, 0, 0, 0, 0, 0;
    } else {
      v0 = parse_state(state_csv, 6);
    }
    model.validate_initial(v0);
    IntegratorConfig ic = integ_for(o, 1.0);
    Trajectory tr = integrate(model.ode6(), v0, 0.0, t1, ic);
    atomic_write_file(o.out_dir + "/trajectory.csv", trajectory_csv(tr, 6, 0));
    std::cout << "wrote " << o.out_dir << "/trajectory.csv ("
              << tr.times.size() << " rows, status " << to_string(tr.status)
              << ")\n";
    return tr.status == TrajStatus::StepFailure ? 3 : 0;
  }
  if (cfg.model == "futile-cycle-reduced") {
    FutileCycleParams p = models::futile_params_from(cfg);
    auto red = models::reduced_futile_cycle(p);
    Vec v0 = state_csv.empty() ? Vec(Vec::Constant(2, 0.25))
                               : parse_state(state_csv, 2);
    OdeFn ode = [&red](double, const Vec& v, Vec& dv) { dv = red.field(v); };
    IntegratorConfig ic = integ_for(o, 1.0);
    Trajectory tr = integrate(ode, v0, 0.0, t1, ic);
    atomic_write_file(o.out_dir + "/trajectory.csv", trajectory_csv(tr, 2, 0));
    std::cout << "wrote " << o.out_dir << "/trajectory.csv\n";
    return tr.status == TrajStatus::StepFailure ? 3 : 0;
  }
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    auto model = models::counterexample_system(cp);
    Vec v0 = state_csv.empty() ? model.domain.analytic_center(cp.eps)
                               : parse_state(state_csv, 2);
    IntegratorConfig ic = integ_for(o, cp.eps);
    IntegrateOptions opts;
    opts.domain = &model.domain;
    opts.domain_eps = cp.eps;
    Trajectory tr =
        integrate(slow_time_ode(model.system, cp.eps), v0, 0.0, t1, ic, opts);
    atomic_write_file(o.out_dir + "/trajectory.csv", trajectory_csv(tr, 1, 1));
    std::cout << "wrote " << o.out_dir << "/trajectory.csv (status "
              << to_string(tr.status) << ")\n";
    return tr.status == TrajStatus::StepFailure ? 3 : 0;
  }
  // scaled slow-fast futile cycle
  FutileCycleParams p = models::futile_params_from(cfg);
  const double eps = p.eps();
  auto model = models::futile_cycle_scaled(p);
  Vec v0 = state_csv.empty() ? model.domain.analytic_center(eps)
                             : parse_state(state_csv, 6);
  IntegratorConfig ic = integ_for(o, eps);
  IntegrateOptions opts;
  opts.domain = &model.domain;
  opts.domain_eps = eps;
  Trajectory tr =
      integrate(slow_time_ode(model.system, eps), v0, 0.0, t1, ic, opts);
  atomic_write_file(o.out_dir + "/trajectory.csv", trajectory_csv(tr, 2, 4));
  std::cout << "wrote " << o.out_dir << "/trajectory.csv (status "
            << to_string(tr.status) << ")\n";
  return tr.status == TrajStatus::StepFailure ? 3 : 0;
}

int run_equilibria(const CommonOpts& o) {
  ModelConfig cfg = resolve_config(o);
  njson doc;
  njson eqs = njson::array();
  double eps_used = 0.0;
  njson pecho;
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    eps_used = cp.eps;
    pecho = params_echo(cp);
    FieldFn field = models::counterexample_planar_field(cp.eps);
    Vec lo(2), hi(2);
    lo << -cp.a, -cp.b1;
    hi << cp.a, cp.b1;
    auto roots = nullcline_equilibria(field, lo, hi, 400);
    for (auto& r : roots) {
      classify(field, r);
      eqs.push_back(to_json(r));
    }
  } else if (cfg.model == "futile-cycle-reduced") {
    FutileCycleParams p = models::futile_params_from(cfg);
    eps_used = p.eps();
    pecho = params_echo(p);
    auto red = models::reduced_futile_cycle(p);
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    auto roots = nullcline_equilibria(
        red.field, lo, hi, 500,
        [&red](const Vec& x) { return red.in_K0(x, -1e-9); });
    for (auto& r : roots) {
      classify(red.field, r);
      eqs.push_back(to_json(r));
    }
  } else if (cfg.model == "futile-cycle") {
    FutileCycleParams p = models::futile_params_from(cfg);
    eps_used = p.eps();
    pecho = params_echo(p);
    auto model = models::futile_cycle_scaled(p);
    for (const auto& r : lifted_equilibria(model, eps_used))
      eqs.push_back(to_json(r));
  } else {
    throw ValidationError("equilibria does not support model " + cfg.model);
  }
  doc["meta"] = make_meta("equilibria", cfg.model, eps_used, o,
                          {{"rtol", o.rtol}, {"atol", o.atol}}, pecho);
  doc["equilibria"] = eqs;
  doc["count"] = eqs.size();
  write_report(o.out_dir, "equilibria.json", doc);
  std::cout << "wrote " << o.out_dir << "/equilibria.json (" << eqs.size()
            << " equilibria)\n";
  return 0;
}

int run_census(const CommonOpts& o, int samples, double horizon, double tol) {
  ModelConfig cfg = resolve_config(o);
  CensusConfig cc;
  cc.n_samples = samples;
  cc.horizon = horizon;
  cc.tol = tol;
  cc.seed = o.seed;
  cc.workers = env_workers();

  CensusReport rep;
  njson pecho;
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    pecho = params_echo(cp);
    auto model = models::counterexample_system(cp);
    cc.integ = integ_for(o, cp.eps);
    FieldFn field = models::counterexample_planar_field(cp.eps);
    Vec lo(2), hi(2);
    lo << -cp.a, -cp.b1;
    hi << cp.a, cp.b1;
    auto eqs = nullcline_equilibria(field, lo, hi, 400);
    for (auto& e : eqs) classify(field, e);
    rep = convergence_census(model.system, model.domain, cp.eps, eqs, cc);
  } else if (cfg.model == "futile-cycle") {
    FutileCycleParams p = models::futile_params_from(cfg);
    pecho = params_echo(p);
    const double eps = p.eps();
    auto model = models::futile_cycle_scaled(p);
    cc.integ = integ_for(o, eps);
    auto eqs = lifted_equilibria(model, eps);
    rep = convergence_census(model.system, model.domain, eps, eqs, cc);
  } else {
    throw ValidationError("census does not support model " + cfg.model);
  }

  njson doc;
  doc["meta"] = make_meta("census", cfg.model, rep.eps, o,
                          {{"rtol", cc.integ.rtol},
                           {"atol", cc.integ.atol},
                           {"horizon", horizon},
                           {"tol", tol},
                           {"eq_radius_factor", cc.eq_radius_factor},
                           {"workers", cc.workers},
                           {"method",
                            cc.integ.method == Method::LinearlyImplicitStiff
                                ? "linearly-implicit-stiff"
                                : "adaptive-explicit-rk"}},
                          pecho);
  doc["census"] = to_json(rep);
  write_report(o.out_dir, "census.json", doc);
  atomic_write_file(o.out_dir + "/census.csv", census_csv(rep));
  std::cout << "wrote " << o.out_dir << "/census.json ("
            << rep.converged << "/" << rep.n_samples << " converged)\n";
  return 0;
}

int run_manifold_error(const CommonOpts& o, const std::string& eps_list_csv,
                       int per_side) {
  ModelConfig cfg = resolve_config(o);
  std::vector<double> eps_list = eps_list_csv.empty()
                                     ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4}
                                     : parse_eps_list(eps_list_csv);
  ManifoldErrorReport rep;
  njson pecho;
  IntegratorConfig ic;
  ic.rtol = o.rtol;
  ic.atol = o.atol;
  double mu = 1.0;
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    pecho = params_echo(cp);
    auto model = models::counterexample_system(cp);
    std::vector<Vec> xs;
    for (int i = 0; i < per_side; ++i) {
      Vec x(1);
      x[0] = -1.0 + 2.0 * i / std::max(1, per_side - 1);
      xs.push_back(x);
    }
    mu = CounterexampleParams::d1;
    rep = manifold_error_scaling(model.system, eps_list, xs, ic, mu);
  } else if (cfg.model == "futile-cycle") {
    FutileCycleParams p = models::futile_params_from(cfg);
    pecho = params_echo(p);
    auto model = models::futile_cycle_scaled(p);
    mu = models::derived_constants(p).mu;
    rep = manifold_error_scaling(model.system, eps_list,
                                 triangle_lattice(0.1, per_side), ic, mu);
  } else {
    throw ValidationError("manifold-error does not support model " + cfg.model);
  }
  njson doc;
  doc["meta"] = make_meta("manifold-error", cfg.model,
                          eps_list.empty() ? 0.0 : eps_list.front(), o,
                          {{"rtol", ic.rtol},
                           {"atol", ic.atol},
                           {"mu", mu},
                           {"boundary_layer_factor", 20.0},
                           {"x_samples_per_side", per_side}},
                          pecho);
  doc["manifold_error"] = to_json(rep);
  write_report(o.out_dir, "manifold_error.json", doc);
  atomic_write_file(o.out_dir + "/manifold_error.csv", manifold_error_csv(rep));
  std::cout << "wrote " << o.out_dir << "/manifold_error.json (slope "
            << rep.slope << ")\n";
  return 0;
}

int run_phase_track(const CommonOpts& o, double displacement) {
  ModelConfig cfg = resolve_config(o);
  PhaseTrackingReport rep;
  njson pecho;
  double eps_used = 0.0, mu = 1.0;
  IntegratorConfig ic;
  ic.rtol = o.rtol;
  ic.atol = o.atol;
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    pecho = params_echo(cp);
    eps_used = cp.eps;
    auto model = models::counterexample_system(cp);
    State s0;
    s0.x = Vec::Constant(1, 0.5);
    s0.y = model.system.m0(s0.x);
    s0.y[0] += displacement;
    PhaseTrackingOptions po;
    po.mu = CounterexampleParams::d1;
    mu = po.mu;
    rep = asymptotic_phase(model.system, s0, cp.eps, ic, po);
  } else if (cfg.model == "futile-cycle") {
    FutileCycleParams p = models::futile_params_from(cfg);
    pecho = params_echo(p);
    eps_used = p.eps();
    auto model = models::futile_cycle_scaled(p);
    State s0;
    s0.x = Vec::Constant(2, 0.3);
    s0.y = model.system.m0(s0.x);
    s0.y[0] += displacement;
    PhaseTrackingOptions po;
    po.mu = models::derived_constants(p).mu;
    mu = po.mu;
    rep = asymptotic_phase(model.system, s0, eps_used, ic, po);
  } else {
    throw ValidationError("phase-track does not support model " + cfg.model);
  }
  njson doc;
  doc["meta"] = make_meta("phase-track", cfg.model, eps_used, o,
                          {{"rtol", ic.rtol},
                           {"atol", ic.atol},
                           {"mu", mu},
                           {"horizon_factor", 40.0},
                           {"displacement", displacement}},
                          pecho);
  doc["phase_tracking"] = to_json(rep);
  write_report(o.out_dir, "phase_track.json", doc);
  std::cout << "wrote " << o.out_dir << "/phase_track.json (rate "
            << rep.fitted_rate << ")\n";
  return 0;
}

int run_monotone_check(const CommonOpts& o) {
  ModelConfig cfg = resolve_config(o);
  if (cfg.model != "futile-cycle" && cfg.model != "futile-cycle-reduced")
    throw ValidationError("monotone-check supports the futile-cycle models");
  FutileCycleParams p = models::futile_params_from(cfg);
  auto red = models::reduced_futile_cycle(p);
  OrthantCone cone(red.cone_signature);
  IntegratorConfig ic;
  ic.rtol = o.rtol;
  ic.atol = o.atol;

  std::uint64_t rng = stream_seed(o.seed, 0xA6);
  auto sample_interior = [&](double margin) {
    for (;;) {
      Vec x(2);
      x[0] = uniform01(rng);
      x[1] = uniform01(rng);
      if (x[0] >= margin && x[1] >= margin && x[0] + x[1] <= 1.0 - margin)
        return x;
    }
  };

  std::vector<Vec> kamke_pts;
  for (int i = 0; i < 1000; ++i) kamke_pts.push_back(sample_interior(1e-3));
  KamkeReport kr = kamke_check(red.field, kamke_pts, cone, true);

  std::vector<Vec> epd_pts;
  for (int i = 0; i < 20; ++i) epd_pts.push_back(sample_interior(1e-3));
  EpdReport er = eventually_positive_derivatives(
      red.field, cone, epd_pts, {0.5, 1.0, 2.0, 5.0, 10.0}, ic);

  std::vector<std::pair<Vec, Vec>> pairs;
  for (int i = 0; i < 100; ++i) {
    Vec u = sample_interior(0.1);
    const double d1 = 1e-3 + uniform01(rng) * std::min(0.08, u[0] - 1e-3);
    const double d2 = 1e-3 + uniform01(rng) * 0.08;
    Vec v(2);
    v[0] = u[0] - d1;
    v[1] = u[1] + d2;
    pairs.emplace_back(u, v);
  }
  auto op = monotone_order_preservation_test(red.field, cone, pairs, 5.0, ic,
                                             /*strong=*/true);
  int preserved = 0;
  for (const auto& c : op)
    if (c.preserved) ++preserved;

  njson doc;
  doc["meta"] = make_meta("monotone-check", cfg.model, p.eps(), o,
                          {{"rtol", ic.rtol},
                           {"atol", ic.atol},
                           {"kamke_samples", 1000},
                           {"epd_samples", 20},
                           {"epd_t_grid", {0.5, 1.0, 2.0, 5.0, 10.0}},
                           {"pairs", 100},
                           {"pair_time", 5.0},
                           {"interior_margin", 1e-3}},
                          params_echo(p));
  doc["cone_signature"] = red.cone_signature;
  doc["kamke"] = to_json(kr);
  doc["epd"] = to_json(er);
  doc["order_preservation"] = {{"pairs", pairs.size()},
                               {"preserved", preserved},
                               {"all_preserved",
                                preserved == static_cast<int>(pairs.size())},
                               {"strong", true},
                               {"t", 5.0}};
  write_report(o.out_dir, "monotone_check.json", doc);
  std::cout << "wrote " << o.out_dir << "/monotone_check.json (kamke "
            << (kr.pass ? "pass" : "FAIL") << ", epd t0 "
            << (er.achieved ? std::to_string(er.t0) : "not-achieved") << ", "
            << preserved << "/100 pairs)\n";
  return 0;
}

int run_check_assumptions(const CommonOpts& o) {
  ModelConfig cfg = resolve_config(o);
  models::AuditConfig ac;
  ac.seed = o.seed;
  ac.integ.rtol = o.rtol;
  ac.integ.atol = o.atol;
  models::AssumptionReport rep;
  njson pecho;
  double eps_used;
  if (cfg.model == "counterexample") {
    CounterexampleParams cp = models::counterexample_params_from(cfg);
    pecho = params_echo(cp);
    ac.eps = cp.eps;
    eps_used = cp.eps;
    rep = models::audit_counterexample(cp, ac);
  } else if (cfg.model == "futile-cycle") {
    FutileCycleParams p = models::futile_params_from(cfg);
    pecho = params_echo(p);
    ac.eps = p.eps();
    eps_used = p.eps();
    rep = models::audit_futile_cycle(p, ac);
  } else {
    throw ValidationError("check-assumptions supports futile-cycle and "
                          "counterexample");
  }
  njson doc;
  doc["meta"] = make_meta("check-assumptions", cfg.model, eps_used, o,
                          {{"rtol", ac.integ.rtol},
                           {"atol", ac.integ.atol},
                           {"manifold_samples", ac.manifold_samples},
                           {"hurwitz_grid", ac.hurwitz_grid},
                           {"boundary_samples", ac.boundary_samples},
                           {"kamke_samples", ac.kamke_samples},
                           {"epd_samples", ac.epd_samples},
                           {"epd_t_grid", ac.epd_t_grid}},
                          pecho);
  doc["report"] = to_json(rep);
  write_report(o.out_dir, "assumptions.json", doc);
  std::cout << "wrote " << o.out_dir << "/assumptions.json ("
            << (rep.all_ok() ? "all pass" : "FAILURES") << ")\n";
  return rep.all_ok() ? 0 : 3;
}

int run_limit_cycle(const CommonOpts& o, const std::string& state_csv) {
  ModelConfig cfg = resolve_config(o);
  if (cfg.model != "counterexample")
    throw ValidationError("limit-cycle supports the counterexample model");
  CounterexampleParams cp = models::counterexample_params_from(cfg);
  FieldFn field = models::counterexample_planar_field(cp.eps);
  Vec s0 = state_csv.empty() ? Vec(Vec::Constant(2, 0.5))
                             : parse_state(state_csv, 2);

  Vec lo(2), hi(2);
  lo << -cp.a, -cp.b1;
  hi << cp.a, cp.b1;
  auto eqs = nullcline_equilibria(field, lo, hi, 400);
  for (auto& e : eqs) classify(field, e);

  LimitCycleConfig lc;
  lc.integ.rtol = o.rtol;
  lc.integ.atol = o.atol;
  EventSpec section;
  section.fn = [](const Vec& v) { return v[0]; };
  section.direction = CrossingDirection::Up;
  section.refine_tol = 1e-10;
  LimitCycleReport rep = detect_limit_cycle(field, s0, section,
                                            "x = 0, upward", lc, eqs);

  njson doc;
  doc["meta"] = make_meta("limit-cycle", cfg.model, cp.eps, o,
                          {{"rtol", lc.integ.rtol},
                           {"atol", lc.integ.atol},
                           {"min_crossings", lc.min_crossings},
                           {"max_crossings", lc.max_crossings},
                           {"horizon", lc.horizon},
                           {"crossing_tol", lc.crossing_tol},
                           {"eq_exclusion", lc.eq_exclusion}},
                          params_echo(cp));
  doc["limit_cycle"] = to_json(rep);
  njson eqj = njson::array();
  for (const auto& e : eqs) eqj.push_back(to_json(e));
  doc["equilibria"] = eqj;
  write_report(o.out_dir, "limit_cycle.json", doc);
  std::cout << "wrote " << o.out_dir << "/limit_cycle.json (verdict "
            << to_string(rep.verdict) << ")\n";
  return 0;
}

} // namespace

int dispatch(std::vector<std::string> args) {
  CLI::App app{"slow-fast monotone systems toolbox"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string state_csv, eps_list_csv;
  double t1 = 100.0, tol = 1e-6, horizon = 100.0, displacement = 0.1;
  int samples = 1000, per_side = 7;

  auto* sim = app.add_subcommand("simulate", "integrate and write a trajectory CSV");
  add_common(sim, o);
  sim->add_option("--state", state_csv, "initial state, comma separated");
  sim->add_option("--t1", t1, "end time")->capture_default_str();

  auto* eq = app.add_subcommand("equilibria", "find and classify equilibria");
  add_common(eq, o);

  auto* cen = app.add_subcommand("census", "seeded convergence census over D_eps");
  add_common(cen, o);
  cen->add_option("--samples", samples, "number of census samples")
      ->capture_default_str();
  cen->add_option("--horizon", horizon, "integration horizon")
      ->capture_default_str();
  cen->add_option("--tol", tol, "field-norm convergence tolerance")
      ->capture_default_str();

  auto* me = app.add_subcommand("manifold-error",
                                "O(eps) slow-manifold error scaling");
  add_common(me, o, /*with_eps=*/false);
  me->add_option("--eps-list", eps_list_csv,
                 "comma-separated eps values (decreasing)");
  me->add_option("--x-samples", per_side, "slow samples per side")
      ->capture_default_str();

  auto* pt = app.add_subcommand("phase-track",
                                "asymptotic-phase distance tracking");
  add_common(pt, o);
  pt->add_option("--displacement", displacement, "initial fast displacement")
      ->capture_default_str();

  auto* mc = app.add_subcommand("monotone-check",
                                "Kamke, EPD and order-preservation certificates");
  add_common(mc, o);

  auto* ca = app.add_subcommand("check-assumptions", "audit assumptions A1-A7");
  add_common(ca, o);

  auto* lcycle = app.add_subcommand("limit-cycle",
                                    "Poincare return-map cycle detection");
  add_common(lcycle, o);
  lcycle->add_option("--state", state_csv, "initial state, comma separated");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(o, state_csv, t1);
    if (eq->parsed()) return run_equilibria(o);
    if (cen->parsed()) return run_census(o, samples, horizon, tol);
    if (me->parsed()) return run_manifold_error(o, eps_list_csv, per_side);
    if (pt->parsed()) return run_phase_track(o, displacement);
    if (mc->parsed()) return run_monotone_check(o);
    if (ca->parsed()) return run_check_assumptions(o);
    if (lcycle->parsed()) return run_limit_cycle(o, state_csv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainUndefinedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedOperationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

} // namespace slowfast
