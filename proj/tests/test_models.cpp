#include <doctest.h>

#include <cmath>

#include "slowfast/integrate.hpp"
#include "slowfast/newton.hpp"
#include "slowfast/models/counterexample.hpp"
#include "slowfast/models/futile_cycle.hpp"
#include "slowfast/models/registry.hpp"
#include "test_support.hpp"

using namespace slowfast;
using test::vec;
using models::CounterexampleParams;
using models::FutileCycleParams;

TEST_CASE("parameter validation is eager") {
  auto p = FutileCycleParams::all_ones(0.1);
  p.k1 = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_THROWS_AS(models::futile_cycle_scaled(p), ValidationError);
  p.k1 = 1.0;
  p.E_tot = 0.6; // eps = 0.6 > eps0 = 0.5 at c = 1... but c changes with E_tot
  // c = F_tot/E_tot = 1/6 -> eps0 = 6/7; pick a genuinely invalid eps
  p.E_tot = 0.95;
  p.F_tot = 0.95;
  CHECK_THROWS_AS(p.validate(), ValidationError);

  auto q = FutileCycleParams::all_ones(0.3);
  CHECK(q.eps() == doctest::Approx(0.3));
  auto q2 = q.with_eps(1e-3);
  CHECK(q2.eps() == doctest::Approx(1e-3));
  CHECK(q2.c() == doctest::Approx(q.c()));
}

TEST_CASE("mass-action derivatives and conservation structure") {
  auto p = FutileCycleParams::all_ones(0.1);
  auto model = models::futile_cycle_mass_action(p);

  SUBCASE("pure substrate start") {
    Vec s0(6);
    s0 << p.S_tot, 0, 0, 0, 0, 0;
    model.validate_initial(s0);
    Vec d = model.rhs6(s0);
    CHECK(d[0] == doctest::Approx(-p.k1 * p.S_tot * p.E_tot)); // dS0
    CHECK(d[2] == doctest::Approx(p.k1 * p.S_tot * p.E_tot));  // dC1
    CHECK(d[1] == doctest::Approx(0.0));
    CHECK(d[3] == doctest::Approx(0.0));
    CHECK(d[4] == doctest::Approx(0.0));
    CHECK(d[5] == doctest::Approx(0.0));
  }

  SUBCASE("C1 equilibrates the reversible pair") {
    // choose C1 so that k1 S0 E = (k_m1 + k2) C1, then dC1 = 0
    Vec s(6);
    s << 0.4, 0.1, 0.0, 0.0, 0.0, 0.0;
    const double E = p.E_tot;
    const double C1 = p.k1 * 0.4 * E / (p.k_m1 + p.k2);
    // solving with E depending on C1: k1 S0 (E_tot - C1) = (k_m1+k2) C1
    const double C1_exact =
        p.k1 * 0.4 * p.E_tot / (p.k_m1 + p.k2 + p.k1 * 0.4);
    s[2] = C1_exact;
    (void)C1;
    Vec d = model.rhs6(s);
    CHECK(d[2] == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("expand/restrict round trip and 6 vs 9 consistency") {
    Vec s6(6);
    s6 << 0.5, 0.2, 0.02, 0.03, 0.01, 0.04;
    model.validate_initial(s6);
    Vec s9 = model.expand(s6);
    CHECK((model.restrict_to6(s9) - s6).lpNorm<Eigen::Infinity>() == 0.0);
    Vec t = model.totals9(s9);
    CHECK(t[0] == doctest::Approx(p.S_tot));
    CHECK(t[1] == doctest::Approx(p.E_tot));
    CHECK(t[2] == doctest::Approx(p.F_tot));
    // the 6-chart derivatives agree with the full 9-species field
    Vec d9 = model.rhs9(s9);
    Vec d6 = model.rhs6(s6);
    CHECK(d6[0] == doctest::Approx(d9[0]));
    CHECK(d6[1] == doctest::Approx(d9[2]));
    CHECK(d6[2] == doctest::Approx(d9[3]));
    CHECK(d6[3] == doctest::Approx(d9[4]));
    CHECK(d6[4] == doctest::Approx(d9[6]));
    CHECK(d6[5] == doctest::Approx(d9[5]));
  }

  SUBCASE("invalid initial states are rejected") {
    Vec s(6);
    s << 0.5, 0.2, 0.08, 0.03, 0.01, 0.04; // C1 + C2 = 0.11 > E_tot
    CHECK_THROWS_AS(model.validate_initial(s), InvalidStateError);
    s << -0.1, 0.2, 0.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(model.validate_initial(s), InvalidStateError);
    s << 0.99, 0.02, 0.0, 0.0, 0.0, 0.0; // S1 recovered negative
    CHECK_THROWS_AS(model.validate_initial(s), InvalidStateError);
  }

  SUBCASE("totals are conserved along a 9-species integration") {
    std::uint64_t rng = 21;
    IntegratorConfig cfg;
    for (int trial = 0; trial < 3; ++trial) {
      // random distribution of the totals over the species
      double e1 = uniform01(rng), e2 = uniform01(rng);
      double f1 = uniform01(rng), f2 = uniform01(rng);
      Vec s6(6);
      s6 << 0.3 * uniform01(rng), 0.3 * uniform01(rng),
          0.5 * p.E_tot * e1, 0.5 * p.E_tot * e2, 0.5 * p.F_tot * f1,
          0.5 * p.F_tot * f2;
      model.validate_initial(s6);
      Vec s9 = model.expand(s6);
      Trajectory tr = integrate(model.ode9(), s9, 0.0, 20.0, cfg);
      REQUIRE(tr.status == TrajStatus::Completed);
      const Vec t0 = model.totals9(tr.states.front());
      for (const Vec& st : tr.states) {
        const Vec tt = model.totals9(st);
        for (int i = 0; i < 3; ++i)
          CHECK(std::abs(tt[i] - t0[i]) / t0[i] <= 1e-8);
      }
    }
  }
}

TEST_CASE("scaled system matches the mass-action model") {
  auto p = FutileCycleParams::all_ones(0.1);
  const double eps = p.eps(), c = p.c();
  auto ma = models::futile_cycle_mass_action(p);
  auto scaled = models::futile_cycle_scaled(p);

  Vec s6(6);
  s6 << 0.5, 0.2, 0.02, 0.03, 0.01, 0.04;

  auto to_scaled = [&](const Vec& s) {
    Vec v(6);
    v << s[0] / p.S_tot, s[1] / p.S_tot, s[2] / p.E_tot, s[3] / p.E_tot,
        s[4] / p.F_tot, s[5] / p.F_tot;
    return v;
  };

  const double T_tau = 50.0;
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;

  IntegrateOptions mopt;
  mopt.output_times = {10.0, 25.0, T_tau};
  Trajectory tr_ma = integrate(ma.ode6(), s6, 0.0, T_tau, cfg, mopt);
  REQUIRE(tr_ma.status == TrajStatus::Completed);

  IntegrateOptions sopt;
  sopt.output_times = {10.0 * eps, 25.0 * eps, T_tau * eps};
  Trajectory tr_sc = integrate(slow_time_ode(scaled.system, eps), to_scaled(s6),
                               0.0, T_tau * eps, cfg, sopt);
  REQUIRE(tr_sc.status == TrajStatus::Completed);

  REQUIRE(tr_ma.times.size() == tr_sc.times.size());
  for (std::size_t k = 0; k < tr_ma.times.size(); ++k) {
    const Vec expect = to_scaled(tr_ma.states[k]);
    CHECK((tr_sc.states[k] - expect).lpNorm<Eigen::Infinity>() < 1e-6);
  }

  SUBCASE("alternative scaling tracks the same trajectory") {
    auto alt = models::alternative_scaling(p);
    CHECK(alt.A == doctest::Approx(9.0)); // S_tot + 4 * Km = 1 + 8
    CHECK(alt.eps_prime == doctest::Approx(p.E_tot / 9.0));
    CHECK(alt.eps_prime < eps);

    auto to_alt = [&](const Vec& s) {
      Vec v(6);
      v << s[0] / alt.A, s[1] / alt.A, s[2] / p.E_tot, s[3] / p.E_tot,
          s[4] / p.F_tot, s[5] / p.F_tot;
      return v;
    };
    IntegrateOptions aopt;
    aopt.output_times = {10.0 * alt.eps_prime, 25.0 * alt.eps_prime,
                         T_tau * alt.eps_prime};
    Trajectory tr_alt =
        integrate(slow_time_ode(alt.scaled.system, alt.eps_prime), to_alt(s6),
                  0.0, T_tau * alt.eps_prime, cfg, aopt);
    REQUIRE(tr_alt.status == TrajStatus::Completed);
    for (std::size_t k = 0; k < tr_ma.times.size(); ++k) {
      const Vec expect = to_alt(tr_ma.states[k]);
      CHECK((tr_alt.states[k] - expect).lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }

  SUBCASE("consistency with conservation: c y3 + c y4 recovers F usage") {
    // spot check that the scaled field encodes the same reaction content
    Vec v = to_scaled(s6);
    State st = scaled.system.unpack(v);
    State d = scaled.system.eval_slow_time(st, eps);
    Vec d_ma = ma.rhs6(s6);
    // dx1/dt = (d[S0]/dtau) / (S_tot * eps)
    CHECK(d.x[0] == doctest::Approx(d_ma[0] / (p.S_tot * eps)).epsilon(1e-12));
    CHECK(d.x[1] == doctest::Approx(d_ma[1] / (p.S_tot * eps)).epsilon(1e-12));
    (void)c;
  }
}

TEST_CASE("closed-form manifold values and domain guard") {
  auto p = FutileCycleParams::all_ones(0.1);
  SUBCASE("displayed values") {
    Vec y = models::futile_cycle_m0(p, vec({0.0, 0.0}));
    CHECK(y[0] == doctest::Approx(0.0));
    CHECK(y[1] == doctest::Approx(1.0 / 3.0));
    CHECK(y[2] == doctest::Approx(1.0 / 3.0));
    CHECK(y[3] == doctest::Approx(0.0));
    Vec y2 = models::futile_cycle_m0(p, vec({1.0, 0.0}));
    CHECK(y2[0] == doctest::Approx(1.0 / 3.0));
    CHECK(y2[1] == doctest::Approx(0.0));
  }
  SUBCASE("residual vanishes on 1000 random points of K0") {
    auto scaled = models::futile_cycle_scaled(p);
    std::uint64_t rng = 23;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Vec x(2);
      do {
        x[0] = uniform01(rng);
        x[1] = uniform01(rng);
      } while (x[0] + x[1] > 1.0);
      const Vec y = models::futile_cycle_m0(p, x);
      worst = std::max(
          worst, scaled.system.g0(x, y, 0.0).lpNorm<Eigen::Infinity>());
    }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("outside U the denominators fail") {
    // for all-ones rates D1 = 3 - x2 and D2 = 3 - x1
    CHECK_THROWS_AS(models::futile_cycle_m0(p, vec({0.0, 3.0})), DomainError);
    CHECK_THROWS_AS(models::futile_cycle_m0(p, vec({3.5, 0.0})), DomainError);
  }
}

TEST_CASE("reduced planar system") {
  auto p = FutileCycleParams::all_ones(0.1);
  auto red = models::reduced_futile_cycle(p);
  auto scaled = models::futile_cycle_scaled(p);

  SUBCASE("swap equivariance for symmetric branches") {
    std::uint64_t rng = 29;
    for (int i = 0; i < 100; ++i) {
      Vec x(2);
      do {
        x[0] = uniform01(rng);
        x[1] = uniform01(rng);
      } while (x[0] + x[1] > 1.0);
      Vec F = red.field(x);
      Vec Fs = red.field(vec({x[1], x[0]}));
      CHECK(F[0] == doctest::Approx(Fs[1]).epsilon(1e-12));
      CHECK(F[1] == doctest::Approx(Fs[0]).epsilon(1e-12));
    }
  }
  SUBCASE("slow block on the manifold equals the reduced field") {
    std::uint64_t rng = 31;
    for (int i = 0; i < 200; ++i) {
      Vec x(2);
      do {
        x[0] = uniform01(rng);
        x[1] = uniform01(rng);
      } while (x[0] + x[1] > 1.0);
      const Vec y = scaled.system.m0(x);
      const Vec f = scaled.system.f0(x, y, 0.0);
      CHECK((f - red.field(x)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
  SUBCASE("cross partial derivatives are strictly negative") {
    std::uint64_t rng = 37;
    const double h = 1e-6;
    for (int i = 0; i < 1000; ++i) {
      Vec x(2);
      do {
        x[0] = 1e-3 + (1.0 - 2e-3) * uniform01(rng);
        x[1] = 1e-3 + (1.0 - 2e-3) * uniform01(rng);
      } while (x[0] + x[1] > 1.0 - 1e-3);
      const double dF1_dx2 =
          (red.field(vec({x[0], x[1] + h}))[0] -
           red.field(vec({x[0], x[1] - h}))[0]) /
          (2 * h);
      const double dF2_dx1 =
          (red.field(vec({x[0] + h, x[1]}))[1] -
           red.field(vec({x[0] - h, x[1]}))[1]) /
          (2 * h);
      CHECK(dF1_dx2 < 0.0);
      CHECK(dF2_dx1 < 0.0);
    }
  }
}

TEST_CASE("derived constants") {
  auto p = FutileCycleParams::all_ones(0.1);
  auto dc = models::derived_constants(p);
  CHECK(dc.Km1 == doctest::Approx(2.0));
  CHECK(dc.Km2 == doctest::Approx(2.0));
  CHECK(dc.Km3 == doctest::Approx(2.0));
  CHECK(dc.Km4 == doctest::Approx(2.0));
  CHECK(dc.sigma0 == doctest::Approx(1.0)); // (2*2)/(1*4)
  // trace bound 4/2 = 2, determinant bound 4/4 = 1 -> sigma = 1
  CHECK(dc.sigma == doctest::Approx(1.0));
  CHECK(dc.sigma <= dc.sigma0);
  CHECK(dc.eps0 == doctest::Approx(0.5));
  CHECK(dc.mu > 0.0);
}

TEST_CASE("Hurwitz blocks") {
  auto p = FutileCycleParams::all_ones(0.1);
  SUBCASE("displayed values at the origin") {
    auto hb = models::hurwitz_blocks(p, vec({0.0, 0.0}));
    Mat B1(2, 2), B2(2, 2);
    B1 << -2, 0, -1, -3;
    B2 << -3, -1, 0, -2;
    CHECK((hb.B1 - B1).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((hb.B2 - B2).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(hb.neg_trace1 == doctest::Approx(5.0));
    CHECK(hb.det1 == doctest::Approx(6.0));
    CHECK(hb.hurwitz);
  }
  SUBCASE("trace/det criterion agrees with the eigenvalue test") {
    std::uint64_t rng = 41;
    for (int i = 0; i < 1000; ++i) {
      Vec x(2);
      x[0] = -0.5 + 2.0 * uniform01(rng);
      x[1] = -0.5 + 2.0 * uniform01(rng);
      auto hb = models::hurwitz_blocks(p, x);
      bool eig_stable = true;
      for (const auto& ev : hb.eigenvalues)
        if (!(ev.real() < 0.0)) eig_stable = false;
      CHECK(hb.hurwitz == eig_stable);
    }
  }
}

TEST_CASE("counterexample model") {
  SUBCASE("defaults satisfy the box conditions") {
    auto cp = CounterexampleParams::with_defaults(2.0);
    CHECK(cp.b1 == doctest::Approx(3.0));
    CHECK(models::cx_beta(cp.a) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(cp.a == doctest::Approx(2.72218).epsilon(1e-4));
  }
  SUBCASE("invalid boxes are rejected") {
    CounterexampleParams cp;
    cp.eps = 1.0;
    cp.b1 = 1.5; // <= M1/d1 = 2
    cp.a = 5.0;
    CHECK_THROWS_AS(cp.validate(), ValidationError);
    cp.b1 = 3.0;
    cp.a = 1.0; // beta(1) < 3
    CHECK_THROWS_AS(cp.validate(), ValidationError);
  }
  SUBCASE("origin is the equilibrium") {
    auto cp = CounterexampleParams::with_defaults(2.0);
    auto model = models::counterexample_system(cp);
    State origin(vec({0.0}), vec({0.0}));
    State d = model.system.eval_slow_time(origin, cp.eps);
    CHECK(d.x[0] == 0.0);
    CHECK(d.y[0] == 0.0);
    CHECK(model.system.m0(vec({0.7}))[0] ==
          doctest::Approx(-2.0 * std::tanh(0.7)));
  }
  SUBCASE("field points inward on the x = a face") {
    auto cp = CounterexampleParams::with_defaults(2.0);
    auto model = models::counterexample_system(cp);
    for (double y1 = -cp.b1; y1 <= cp.b1; y1 += 0.25) {
      State s(vec({cp.a}), vec({y1}));
      State d = model.system.eval_slow_time(s, cp.eps);
      CHECK(d.x[0] < 0.0);
    }
  }
  SUBCASE("origin Jacobian closed form and finite differences") {
    auto j2 = models::counterexample_jacobian_origin(2.0);
    CHECK(j2.trace == doctest::Approx(0.5));
    CHECK(j2.det == doctest::Approx(0.5));
    auto j01 = models::counterexample_jacobian_origin(0.1);
    CHECK(j01.trace == doctest::Approx(-9.0));
    CHECK(j01.det == doctest::Approx(10.0));
    auto j1 = models::counterexample_jacobian_origin(1.0);
    CHECK(j1.trace == doctest::Approx(0.0));

    for (double eps : {0.1, 0.5, 2.0}) {
      FieldFn f = models::counterexample_planar_field(eps);
      VecFn F = [&f](const Vec& v) { return f(v); };
      Mat J_fd = fd_jacobian_of(F, vec({0.0, 0.0}));
      auto oj = models::counterexample_jacobian_origin(eps);
      CHECK((J_fd - oj.J).lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }
  SUBCASE("reduced scalar equation changes sign only at the origin") {
    auto g = models::counterexample_reduced_scalar();
    int sign_changes = 0;
    double prev = g(-5.0);
    for (int i = 1; i <= 10000; ++i) {
      const double x = -5.0 + 10.0 * i / 10000.0;
      const double v = g(x);
      if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) ++sign_changes;
      if (v != 0.0) prev = v;
    }
    CHECK(sign_changes == 1);
    CHECK(g(0.0) == 0.0);
  }
}

TEST_CASE("boundary of D_eps points inward") {
  auto p = FutileCycleParams::all_ones(0.1);
  auto model = models::futile_cycle_scaled(p);
  const double eps = 0.1;
  std::uint64_t rng = 43;
  const auto& rows = model.domain.rows();
  double worst = -1e300;
  for (int i = 0; i < 1000; ++i) {
    Vec inside = model.domain.sample(eps, rng);
    const int row = static_cast<int>(splitmix64(rng) % rows.size());
    auto [bp, facet] = model.domain.boundary_point(eps, inside, row);
    State s = model.system.unpack(bp);
    State d = model.system.eval_slow_time(s, eps);
    Vec field(6);
    field.head(2) = d.x;
    field.tail(4) = d.y;
    const Vec normal = rows[static_cast<std::size_t>(facet)].row(eps);
    worst = std::max(worst, normal.dot(field) / normal.norm());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("parameter registry and JSON documents") {
  using models::ModelConfig;
  SUBCASE("defaults parse back") {
    for (const auto& key : models::model_keys()) {
      auto doc = models::default_params_json(key);
      ModelConfig cfg = models::parse_model_config(doc);
      CHECK(cfg.model == key);
    }
  }
  SUBCASE("unknown keys are errors") {
    auto doc = models::default_params_json("futile-cycle");
    doc["extra"] = 1;
    CHECK_THROWS_AS(models::parse_model_config(doc), ValidationError);
    auto doc2 = models::default_params_json("futile-cycle");
    doc2["params"]["k99"] = 1.0;
    CHECK_THROWS_AS(models::parse_model_config(doc2), ValidationError);
    nlohmann::ordered_json doc3 = {{"model", "no-such-model"}};
    CHECK_THROWS_AS(models::parse_model_config(doc3), ValidationError);
  }
  SUBCASE("eps override rescales the totals") {
    ModelConfig cfg;
    cfg.model = "futile-cycle";
    cfg.params = {{"k2", 3.0}};
    cfg.eps = 1e-3;
    auto p = models::futile_params_from(cfg);
    CHECK(p.k2 == 3.0);
    CHECK(p.eps() == doctest::Approx(1e-3));
    CHECK(p.c() == doctest::Approx(1.0));
  }
  SUBCASE("counterexample params") {
    ModelConfig cfg;
    cfg.model = "counterexample";
    cfg.eps = 2.0;
    auto cp = models::counterexample_params_from(cfg);
    CHECK(cp.eps == 2.0);
    CHECK(cp.b1 == doctest::Approx(3.0));
  }
}
