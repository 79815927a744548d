#include <doctest.h>

#include <cmath>

#include "slowfast/analysis.hpp"
#include "slowfast/models/counterexample.hpp"
#include "slowfast/report_io.hpp"
#include "test_support.hpp"

using namespace slowfast;
using test::vec;
using models::CounterexampleParams;
using models::FutileCycleParams;

namespace {

std::vector<Equilibrium> counterexample_equilibria(double eps) {
  auto cp = CounterexampleParams::with_defaults(eps);
  FieldFn field = models::counterexample_planar_field(eps);
  Vec lo(2), hi(2);
  lo << -cp.a, -cp.b1;
  hi << cp.a, cp.b1;
  auto eqs = nullcline_equilibria(field, lo, hi, 400);
  for (auto& e : eqs) classify(field, e);
  return eqs;
}

} // namespace

TEST_CASE("equilibria of the counterexample: exactly the origin") {
  auto eqs = counterexample_equilibria(2.0);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].location.lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(eqs[0].residual <= 1e-10);
}

TEST_CASE("reduced futile cycle roots") {
  SUBCASE("all-ones parameters give the symmetric root") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    auto roots = nullcline_equilibria(
        red.field, lo, hi, 500,
        [&red](const Vec& x) { return red.in_K0(x, -1e-9); });
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].location[0] - roots[0].location[1]) <= 1e-8);
    CHECK(roots[0].location[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(roots[0].residual <= 1e-10);
  }
  SUBCASE("bistable parameters give three roots, two stable") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::bistable(1e-3));
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    auto roots = nullcline_equilibria(
        red.field, lo, hi, 500,
        [&red](const Vec& x) { return red.in_K0(x, -1e-9); });
    REQUIRE(roots.size() == 3);
    int stable = 0, saddle = 0;
    for (auto& r : roots) {
      classify(red.field, r);
      if (r.classification == EqClass::StableNode ||
          r.classification == EqClass::StableFocus)
        ++stable;
      if (r.classification == EqClass::Saddle) ++saddle;
    }
    CHECK(stable == 2);
    CHECK(saddle == 1);
  }
  SUBCASE("roots reappear under a refined seed grid") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::bistable(1e-3));
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    auto coarse = nullcline_equilibria(red.field, lo, hi, 250);
    auto fine = nullcline_equilibria(red.field, lo, hi, 500);
    REQUIRE(coarse.size() == fine.size());
    for (const auto& c : coarse) {
      double best = 1e300;
      for (const auto& f : fine)
        best = std::min(best, (c.location - f.location).norm());
      CHECK(best <= 1e-8);
    }
  }
}

TEST_CASE("classification") {
  SUBCASE("canonical saddle") {
    FieldFn f = [](const Vec& v) {
      Vec d(2);
      d[0] = v[0];
      d[1] = -v[1];
      return d;
    };
    Equilibrium eq;
    eq.location = vec({0.0, 0.0});
    classify(f, eq);
    CHECK(eq.classification == EqClass::Saddle);
  }
  SUBCASE("counterexample origin across eps") {
    auto expect_stability = [](double eps) {
      auto eqs = counterexample_equilibria(eps);
      REQUIRE(eqs.size() == 1);
      return eqs[0].classification;
    };
    CHECK(expect_stability(2.0) == EqClass::UnstableFocus);
    // trace -9, det 10: real eigenvalues, both negative
    CHECK(expect_stability(0.1) == EqClass::StableNode);
    // the trace sign 1 - 1/eps decides stability
    CHECK(expect_stability(0.5) == EqClass::StableFocus);
    CHECK(expect_stability(0.9) == EqClass::StableFocus);
    CHECK(expect_stability(1.1) == EqClass::UnstableFocus);
  }
  SUBCASE("unstable-focus discriminant at eps = 2") {
    // trace^2 = 0.25 < 4 det = 2, so the unstable pair is complex
    auto oj = models::counterexample_jacobian_origin(2.0);
    CHECK(oj.trace * oj.trace < 4.0 * oj.det);
  }
}

TEST_CASE("nullcline scan") {
  SUBCASE("linear field has a single candidate near the origin") {
    FieldFn f = [](const Vec& v) { return v; };
    auto cells = nullcline_scan(f, vec({-1.0, -1.0}), vec({1.0, 1.0}), 101);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].lpNorm<Eigen::Infinity>() < 0.02);
  }
  SUBCASE("count matches find_equilibria on the reduced system") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    auto candidates = nullcline_scan(red.field, lo, hi, 500);
    CHECK(!candidates.empty());
    auto roots = find_equilibria(red.field, candidates);
    CHECK(roots.size() == 1);
  }
}

TEST_CASE("convergence census on the counterexample") {
  auto cp = CounterexampleParams::with_defaults(0.1);
  auto model = models::counterexample_system(cp);
  auto eqs = counterexample_equilibria(0.1);

  CensusConfig cc;
  cc.n_samples = 100;
  cc.horizon = 200.0;
  cc.tol = 1e-6;
  cc.seed = 7;

  SUBCASE("stable regime: every sample converges to the origin") {
    auto rep = convergence_census(model.system, model.domain, 0.1, eqs, cc);
    CHECK(rep.converged == 100);
    CHECK(rep.basin_tallies[0] == 100);
    CHECK(rep.non_converged.empty());
    CHECK(rep.acceptance_rate == doctest::Approx(1.0)); // box == domain
  }
  SUBCASE("oscillatory regime: nothing converges") {
    auto cp2 = CounterexampleParams::with_defaults(2.0);
    auto model2 = models::counterexample_system(cp2);
    auto eqs2 = counterexample_equilibria(2.0);
    CensusConfig cc2 = cc;
    cc2.horizon = 100.0;
    auto rep = convergence_census(model2.system, model2.domain, 2.0, eqs2, cc2);
    CHECK(rep.converged <= 2);
  }
}

TEST_CASE("census determinism and horizon monotonicity") {
  auto p = FutileCycleParams::all_ones(1e-2);
  auto model = models::futile_cycle_scaled(p);
  auto eqs = lifted_equilibria(model, 1e-2, 300);
  REQUIRE(eqs.size() == 1);

  CensusConfig cc;
  cc.n_samples = 40;
  cc.horizon = 60.0;
  cc.tol = 1e-6;
  cc.seed = 7;
  cc.integ.method = Method::LinearlyImplicitStiff;

  auto r1 = convergence_census(model.system, model.domain, 1e-2, eqs, cc);
  auto r2 = convergence_census(model.system, model.domain, 1e-2, eqs, cc);
  cc.workers = 2;
  auto r4 = convergence_census(model.system, model.domain, 1e-2, eqs, cc);

  const std::string j1 = to_json(r1).dump();
  CHECK(j1 == to_json(r2).dump());
  CHECK(j1 == to_json(r4).dump());
  const std::string c1 = census_csv(r1);
  CHECK(c1 == census_csv(r4));

  // doubling the horizon never loses converged samples
  CensusConfig cc_half = cc;
  cc_half.workers = 1;
  cc_half.horizon = 15.0;
  auto r_half = convergence_census(model.system, model.domain, 1e-2, eqs, cc_half);
  CensusConfig cc_full = cc_half;
  cc_full.horizon = 30.0;
  auto r_full = convergence_census(model.system, model.domain, 1e-2, eqs, cc_full);
  CHECK(r_full.converged >= r_half.converged);
}

TEST_CASE("lifted equilibria of the full futile cycle") {
  auto p = FutileCycleParams::all_ones(1e-3);
  auto model = models::futile_cycle_scaled(p);
  auto eqs = lifted_equilibria(model, 1e-3);
  REQUIRE(eqs.size() == 1);
  const auto& eq = eqs[0];
  CHECK(eq.residual <= 1e-10);
  CHECK(eq.location[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-2));
  // stationarity of the full slow-time field
  State s = model.system.unpack(eq.location);
  State d = model.system.eval_slow_time(s, 1e-3);
  CHECK(d.x.lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK(d.y.lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK((eq.classification == EqClass::StableNode ||
         eq.classification == EqClass::StableFocus));
}

TEST_CASE("limit cycle detection") {
  LimitCycleConfig lc;
  EventSpec section;
  section.fn = [](const Vec& v) { return v[0]; };
  section.direction = CrossingDirection::Up;
  section.refine_tol = 1e-10;

  SUBCASE("pure rotation has period two pi") {
    FieldFn rot = [](const Vec& v) {
      Vec d(2);
      d[0] = -v[1];
      d[1] = v[0];
      return d;
    };
    Equilibrium origin;
    origin.location = vec({0.0, 0.0});
    LimitCycleConfig lc2 = lc;
    lc2.horizon = 200.0;
    lc2.integ.rtol = 1e-10;
    lc2.integ.atol = 1e-12;
    auto rep = detect_limit_cycle(rot, vec({1.0, 0.0}), section, "x=0 up", lc2,
                                  {origin});
    CHECK(rep.verdict == CycleVerdict::CycleFound);
    CHECK(rep.period == doctest::Approx(2 * M_PI).epsilon(1e-4 / (2 * M_PI)));
    CHECK(rep.amplitude == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("counterexample at eps = 2 has a cycle") {
    FieldFn field = models::counterexample_planar_field(2.0);
    auto eqs = counterexample_equilibria(2.0);
    auto rep = detect_limit_cycle(field, vec({0.5, 0.5}), section, "x=0 up", lc,
                                  eqs);
    CHECK(rep.verdict == CycleVerdict::CycleFound);
    CHECK(rep.amplitude > 1e-2);
    CHECK(rep.period > 0.0);

    // the period is stable under a tenfold rtol tightening
    LimitCycleConfig tight = lc;
    tight.integ.rtol = lc.integ.rtol / 10.0;
    auto rep2 = detect_limit_cycle(field, vec({0.5, 0.5}), section, "x=0 up",
                                   tight, eqs);
    REQUIRE(rep2.verdict == CycleVerdict::CycleFound);
    CHECK(std::abs(rep2.period - rep.period) / rep.period < 1e-3);
  }
  SUBCASE("counterexample at eps = 0.1 converges instead") {
    FieldFn field = models::counterexample_planar_field(0.1);
    auto eqs = counterexample_equilibria(0.1);
    auto rep = detect_limit_cycle(field, vec({0.5, 0.5}), section, "x=0 up", lc,
                                  eqs);
    CHECK(rep.verdict == CycleVerdict::ConvergedToEquilibrium);
  }
}
