#include <doctest.h>

#include <cmath>

#include "slowfast/models/futile_cycle.hpp"
#include "slowfast/monotone.hpp"
#include "test_support.hpp"

using namespace slowfast;
using test::vec;
using models::FutileCycleParams;

namespace {

Vec random_vec(std::uint64_t& rng, int n, double lo, double hi) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * uniform01(rng);
  return v;
}

Vec sample_triangle(std::uint64_t& rng, double margin) {
  for (;;) {
    Vec x(2);
    x[0] = uniform01(rng);
    x[1] = uniform01(rng);
    if (x[0] >= margin && x[1] >= margin && x[0] + x[1] <= 1.0 - margin)
      return x;
  }
}

const FieldFn rotation = [](const Vec& v) {
  Vec d(2);
  d[0] = v[1];
  d[1] = -v[0];
  return d;
};

} // namespace

TEST_CASE("orthant cone axioms hold on generators") {
  OrthantCone cone({-1, +1, +1});
  auto gens = cone.generators();
  REQUIRE(gens.size() == 3);
  for (const auto& g : gens) CHECK(cone.contains(g));
  // C + C in C and R+ C in C, constructively on generator combinations
  std::uint64_t rng = 1;
  for (int i = 0; i < 200; ++i) {
    Vec u = Vec::Zero(3), v = Vec::Zero(3);
    for (const auto& g : gens) {
      u += uniform01(rng) * g;
      v += uniform01(rng) * g;
    }
    CHECK(cone.contains(u + v));
    CHECK(cone.contains(3.7 * u));
  }
  // C intersect -C = {0}
  for (const auto& g : gens) CHECK_FALSE(cone.contains(-g));
  CHECK(cone.contains(Vec::Zero(3)));
  CHECK_THROWS_AS(OrthantCone({0, 1}), ValidationError);
}

TEST_CASE("cone order classification") {
  OrthantCone pp({+1, +1});
  CHECK(cone_leq(pp, vec({0.0, 0.0}), vec({1.0, 1.0})) == ConeOrder::Strong);
  CHECK(cone_leq(pp, vec({0.0, 0.0}), vec({1.0, 0.0})) == ConeOrder::Strict);
  CHECK(cone_leq(pp, vec({0.0, 0.0}), vec({0.0, 0.0})) == ConeOrder::Leq);
  CHECK(cone_leq(pp, vec({0.0, 0.0}), vec({1.0, -1.0})) == ConeOrder::Unrelated);

  OrthantCone mp({-1, +1});
  CHECK(cone_leq(mp, vec({0.0, 0.0}), vec({-1.0, 1.0})) == ConeOrder::Strong);
  CHECK(cone_leq(mp, vec({0.0, 0.0}), vec({1.0, 1.0})) == ConeOrder::Unrelated);
}

TEST_CASE("cone order is a partial order on samples") {
  OrthantCone cone({-1, +1});
  std::uint64_t rng = 2;
  for (int i = 0; i < 300; ++i) {
    Vec a = random_vec(rng, 2, -1, 1);
    Vec b = random_vec(rng, 2, -1, 1);
    Vec c = random_vec(rng, 2, -1, 1);
    // reflexive
    CHECK(cone_leq(cone, a, a) == ConeOrder::Leq);
    // antisymmetric: a <= b and b <= a only when equal
    const auto ab = cone_leq(cone, a, b);
    const auto ba = cone_leq(cone, b, a);
    if (ab != ConeOrder::Unrelated && ba != ConeOrder::Unrelated)
      CHECK((a - b).norm() == 0.0);
    // transitive on ordered triples
    const auto bc = cone_leq(cone, b, c);
    if (ab != ConeOrder::Unrelated && bc != ConeOrder::Unrelated)
      CHECK(cone_leq(cone, a, c) != ConeOrder::Unrelated);
  }
}

TEST_CASE("dual generators characterize the cone") {
  SUBCASE("positive orthant") {
    OrthantCone cone({+1, +1});
    auto duals = cone.dual_generators();
    CHECK(duals[0].isApprox(vec({1.0, 0.0})));
    CHECK(duals[1].isApprox(vec({0.0, 1.0})));
  }
  SUBCASE("sign-conjugated") {
    OrthantCone cone({-1, +1});
    auto duals = cone.dual_generators();
    CHECK(duals[0].isApprox(vec({-1.0, 0.0})));
    CHECK(duals[1].isApprox(vec({0.0, 1.0})));
  }
  SUBCASE("membership iff all duals nonnegative; interior iff positive") {
    OrthantCone cone({-1, +1, -1});
    auto duals = cone.dual_generators();
    std::uint64_t rng = 3;
    for (int i = 0; i < 10000; ++i) {
      Vec v = random_vec(rng, 3, -1, 1);
      bool all_nonneg = true, all_pos = true;
      for (const auto& lam : duals) {
        const double val = lam.dot(v);
        all_nonneg &= val >= 0.0;
        all_pos &= val > 1e-12;
      }
      CHECK(cone.contains(v) == all_nonneg);
      CHECK(cone.interior_contains(v) == all_pos);
    }
  }
}

TEST_CASE("Kamke sign checks") {
  SUBCASE("decoupled contraction passes non-strict") {
    FieldFn f = [](const Vec& v) { return Vec(-v); };
    std::uint64_t rng = 4;
    std::vector<Vec> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(random_vec(rng, 2, -1, 1));
    auto rep = kamke_check(f, pts, OrthantCone({+1, +1}), false);
    CHECK(rep.pass);
    CHECK_FALSE(kamke_check(f, pts, OrthantCone({+1, +1}), true).pass);
  }
  SUBCASE("rotation violates at every point") {
    std::uint64_t rng = 5;
    std::vector<Vec> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(random_vec(rng, 2, -1, 1));
    auto rep = kamke_check(rotation, pts, OrthantCone({+1, +1}), false);
    CHECK_FALSE(rep.pass);
    // entry (2,1) of the Jacobian is -1 everywhere
    CHECK(rep.violations.size() == pts.size());
    for (const auto& v : rep.violations) {
      CHECK(v.row == 1);
      CHECK(v.col == 0);
      CHECK(v.value == doctest::Approx(-1.0).epsilon(1e-6));
    }
  }
  SUBCASE("reduced futile cycle is strictly Kamke for the (-,+) cone") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
    OrthantCone cone(red.cone_signature);
    std::uint64_t rng = 6;
    std::vector<Vec> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(sample_triangle(rng, 1e-3));
    auto rep = kamke_check(red.field, pts, cone, true);
    CHECK(rep.pass);
    CHECK(rep.min_off_diagonal > 0.0);
  }
}

TEST_CASE("eventually positive derivatives") {
  IntegratorConfig cfg;

  SUBCASE("diagonal stable linear field is positive from the first grid time") {
    FieldFn f = [](const Vec& v) {
      Vec d(2);
      d[0] = -v[0];
      d[1] = -2.0 * v[1];
      return d;
    };
    std::vector<Vec> samples = {vec({0.5, 0.5}), vec({-0.3, 0.2})};
    auto rep = eventually_positive_derivatives(f, OrthantCone({+1, +1}), samples,
                                               {0.5, 1.0, 2.0}, cfg);
    // off-diagonals stay zero: interior positivity fails for a diagonal flow
    CHECK_FALSE(rep.achieved);
  }
  SUBCASE("reduced futile cycle achieves positivity with finite t0") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
    OrthantCone cone(red.cone_signature);
    std::uint64_t rng = 7;
    std::vector<Vec> samples;
    for (int i = 0; i < 20; ++i) samples.push_back(sample_triangle(rng, 1e-3));
    auto rep = eventually_positive_derivatives(red.field, cone, samples,
                                               {0.5, 1.0, 2.0, 5.0, 10.0}, cfg);
    CHECK(rep.achieved);
    CHECK(rep.t0 <= 10.0);
    CHECK(rep.margin_after_t0 > 0.0);
    CHECK(rep.escaped_samples.empty());
    // the sign pattern of D phi_t itself is [[+,-],[-,+]]
    for (const auto& per_sample : rep.values) {
      for (const auto& Mc : per_sample) {
        Mat M = cone.conjugate(Mc); // undo the conjugation
        CHECK(M(0, 0) > 0.0);
        CHECK(M(0, 1) < 0.0);
        CHECK(M(1, 0) < 0.0);
        CHECK(M(1, 1) > 0.0);
      }
    }
  }
  SUBCASE("rotation never achieves positivity") {
    auto rep = eventually_positive_derivatives(rotation, OrthantCone({+1, +1}),
                                               {vec({0.5, 0.0})},
                                               {0.5, 1.0, 2.0, 5.0}, cfg);
    CHECK_FALSE(rep.achieved);
  }
  SUBCASE("samples escaping the box are flagged and excluded") {
    FieldFn drift = [](const Vec&) { return Vec(Vec::Ones(2)); };
    auto rep = eventually_positive_derivatives(
        drift, OrthantCone({+1, +1}), {vec({0.0, 0.0})}, {0.5, 1.0}, cfg,
        vec({-1.0, -1.0}), vec({0.7, 0.7}));
    CHECK(rep.escaped_samples == std::vector<int>{0});
    CHECK_FALSE(rep.achieved);
  }
}

TEST_CASE("C1-perturbed reduced system keeps positive derivatives") {
  auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
  OrthantCone cone(red.cone_signature);
  const double delta = 1e-4;
  FieldFn perturbed = [&red, delta](const Vec& x) {
    Vec f = red.field(x);
    f[0] += delta * std::sin(3.0 * x[0] + 1.0);
    f[1] += delta * std::cos(2.0 * x[1]);
    return f;
  };
  std::uint64_t rng = 8;
  std::vector<Vec> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(sample_triangle(rng, 0.05));
  IntegratorConfig cfg;
  auto rep = eventually_positive_derivatives(perturbed, cone, samples,
                                             {0.5, 1.0, 2.0, 5.0, 10.0}, cfg);
  CHECK(rep.achieved);
  CHECK(rep.margin_after_t0 > 0.0);
}

TEST_CASE("order preservation under the flow") {
  IntegratorConfig cfg;

  SUBCASE("t = 0 preserves trivially") {
    auto cases = monotone_order_preservation_test(
        rotation, OrthantCone({+1, +1}),
        {{vec({0.0, 0.0}), vec({1.0, 0.0})}}, 0.0, cfg, false);
    CHECK(cases[0].preserved);
  }
  SUBCASE("quarter rotation breaks the order") {
    auto cases = monotone_order_preservation_test(
        rotation, OrthantCone({+1, +1}),
        {{vec({0.0, 0.0}), vec({1.0, 0.0})}}, M_PI / 2, cfg, false);
    CHECK_FALSE(cases[0].preserved);
    CHECK(cases[0].ordered_initially);
  }
  SUBCASE("reduced futile cycle preserves the strong order at t = 5") {
    auto red = models::reduced_futile_cycle(FutileCycleParams::all_ones(0.1));
    OrthantCone cone(red.cone_signature);
    std::uint64_t rng = 9;
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int i = 0; i < 100; ++i) {
      Vec u = sample_triangle(rng, 0.1);
      const double d1 = 1e-3 + uniform01(rng) * std::min(0.08, u[0] - 1e-3);
      const double d2 = 1e-3 + uniform01(rng) * 0.08;
      pairs.push_back({u, vec({u[0] - d1, u[1] + d2})});
    }
    auto cases = monotone_order_preservation_test(red.field, cone, pairs, 5.0,
                                                  cfg, /*strong=*/true);
    for (const auto& c : cases) {
      CHECK(c.ordered_initially);
      CHECK(c.preserved);
      CHECK(c.final_order == ConeOrder::Strong);
    }
  }
}
