#include "slowfast/models/futile_cycle.hpp"

#include <algorithm>
#include <cmath>

namespace slowfast::models {

namespace {

/// Paper margin sigma for the scaling with concentration unit A: the
/// smallest of the manifold-positivity bound sigma0 and the four
/// trace/determinant bounds that keep B1, B2 Hurwitz on U.
double sigma_of(const FutileCycleParams& p, double A) {
  const double Km1 = p.Km1(), Km2 = p.Km2(), Km3 = p.Km3(), Km4 = p.Km4();
  const double s0 = std::min(Km1 * Km2 / (A * (Km1 + Km2)),
                             Km3 * Km4 / (A * (Km3 + Km4)));
  const double tr_k = (p.k_m1 + p.k2 + p.k_m3 + p.k4) / (A * (p.k1 + p.k3));
  const double det_k = (p.k_m1 + p.k2) * (p.k_m3 + p.k4) /
                       (A * (p.k1 * (p.k_m3 + p.k4) + p.k3 * (p.k_m1 + p.k2)));
  const double tr_h = (p.h_m1 + p.h2 + p.h_m3 + p.h4) / (A * (p.h1 + p.h3));
  const double det_h = (p.h_m1 + p.h2) * (p.h_m3 + p.h4) /
                       (A * (p.h1 * (p.h_m3 + p.h4) + p.h3 * (p.h_m1 + p.h2)));
  return std::min({s0, tr_k, det_k, tr_h, det_h});
}

double sigma0_of(const FutileCycleParams& p, double A) {
  const double Km1 = p.Km1(), Km2 = p.Km2(), Km3 = p.Km3(), Km4 = p.Km4();
  return std::min(Km1 * Km2 / (A * (Km1 + Km2)), Km3 * Km4 / (A * (Km3 + Km4)));
}

struct ManifoldDenominators {
  double D1, D2, r;
};

ManifoldDenominators denominators(const FutileCycleParams& p, double A, double b,
                                  const Vec& x) {
  ManifoldDenominators d;
  d.r = b - x[0] - x[1];
  d.D1 = p.Km1() / A + p.Km1() * d.r / p.Km2() + x[0];
  d.D2 = p.Km3() / A + p.Km3() * d.r / p.Km4() + x[1];
  return d;
}

Vec m0_general(const FutileCycleParams& p, double A, double b, const Vec& x) {
  const auto d = denominators(p, A, b, x);
  if (!(d.D1 > 0.0) || !(d.D2 > 0.0))
    throw DomainError("critical-manifold denominator not positive: x outside U");
  Vec y(4);
  y[0] = x[0] / d.D1;
  y[1] = (p.Km1() * d.r / p.Km2()) / d.D1;
  y[2] = (p.Km3() * d.r / p.Km4()) / d.D2;
  y[3] = x[1] / d.D2;
  return y;
}

ScaledFutileCycle build_scaled(const FutileCycleParams& p, double A) {
  p.validate();
  const double b = p.S_tot / A;
  const double c = p.c();

  BlockFn f0 = [p, A, c](const Vec& x, const Vec& y, double) {
    Vec dx(2);
    dx[0] = -p.k1 * A * x[0] * (1.0 - y[0] - y[1]) + p.k_m1 * y[0] +
            p.h4 * c * y[2];
    dx[1] = -p.h1 * A * c * x[1] * (1.0 - y[2] - y[3]) + p.h_m1 * c * y[3] +
            p.k4 * y[1];
    return dx;
  };
  BlockFn g0 = [p, A, b, c](const Vec& x, const Vec& y, double eps) {
    const double s1 =
        b - x[0] - x[1] - eps * (y[0] + y[1] + c * y[2] + c * y[3]);
    const double free_e = 1.0 - y[0] - y[1];
    const double free_f = 1.0 - y[2] - y[3];
    Vec g(4);
    g[0] = p.k1 * A * x[0] * free_e - (p.k_m1 + p.k2) * y[0];
    g[1] = p.k3 * A * s1 * free_e - (p.k_m3 + p.k4) * y[1];
    g[2] = p.h3 * A * s1 * free_f - (p.h_m3 + p.h4) * y[2];
    g[3] = p.h1 * A * x[1] * free_f - (p.h_m1 + p.h2) * y[3];
    return g;
  };
  ManifoldFn m0 = [p, A, b](const Vec& x) { return m0_general(p, A, b, x); };
  FastJacFn jac = [p, A, b, c](const Vec& x, const Vec& y, double eps) {
    const double s1 =
        b - x[0] - x[1] - eps * (y[0] + y[1] + c * y[2] + c * y[3]);
    const double free_e = 1.0 - y[0] - y[1];
    const double free_f = 1.0 - y[2] - y[3];
    Mat J = Mat::Zero(4, 4);
    J(0, 0) = -p.k1 * A * x[0] - (p.k_m1 + p.k2);
    J(0, 1) = -p.k1 * A * x[0];
    J(1, 0) = -p.k3 * A * (eps * free_e + s1);
    J(1, 1) = -p.k3 * A * (eps * free_e + s1) - (p.k_m3 + p.k4);
    J(1, 2) = -p.k3 * A * eps * c * free_e;
    J(1, 3) = J(1, 2);
    J(2, 0) = -p.h3 * A * eps * free_f;
    J(2, 1) = J(2, 0);
    J(2, 2) = -p.h3 * A * (eps * c * free_f + s1) - (p.h_m3 + p.h4);
    J(2, 3) = -p.h3 * A * (eps * c * free_f + s1);
    J(3, 2) = -p.h1 * A * x[1];
    J(3, 3) = -p.h1 * A * x[1] - (p.h_m1 + p.h2);
    return J;
  };

  // D_eps exactly as the conservation laws suggest, plus nonnegativity of
  // the individual complex fractions (which also makes the set compact).
  std::vector<EpsAffineRow> rows;
  auto unit = [](int i, double s) {
    Vec a = Vec::Zero(6);
    a[i] = s;
    return a;
  };
  Vec z6 = Vec::Zero(6);
  rows.push_back({unit(0, -1.0), z6, 0.0, 0.0, "x1 >= 0"});
  rows.push_back({unit(1, -1.0), z6, 0.0, 0.0, "x2 >= 0"});
  for (int i = 2; i < 6; ++i)
    rows.push_back({unit(i, -1.0), z6, 0.0, 0.0,
                    "y" + std::to_string(i - 1) + " >= 0"});
  Vec e12 = unit(2, 1.0) + unit(3, 1.0);
  Vec e34 = unit(4, 1.0) + unit(5, 1.0);
  rows.push_back({e12, z6, 1.0, 0.0, "y1+y2 <= 1"});
  rows.push_back({Vec(-e12), z6, 0.0, 0.0, "y1+y2 >= 0"});
  rows.push_back({e34, z6, 1.0, 0.0, "y3+y4 <= 1"});
  rows.push_back({Vec(-e34), z6, 0.0, 0.0, "y3+y4 >= 0"});
  Vec ax = unit(0, 1.0) + unit(1, 1.0);
  Vec ay = unit(2, 1.0) + unit(3, 1.0) + unit(4, c) + unit(5, c);
  rows.push_back({ax, ay, b, 0.0, "substrate simplex upper"});
  rows.push_back({Vec(-ax), Vec(-ay), 0.0, 0.0, "substrate simplex lower"});

  Vec lo(6), hi(6), seed(6);
  lo << 0, 0, 0, 0, 0, 0;
  hi << b, b, 1, 1, 1, 1;
  seed << b / 8, b / 8, 0.05, 0.05, 0.05, 0.05;
  const double eps0 = b / (1.0 + c);
  EpsPolytope domain(std::move(rows), 0.0, eps0, lo, hi, seed);

  const double sigma = sigma_of(p, A);
  SlowDomain sd;
  Vec mx1(2), mx2(2), msum(2);
  mx1 << -1.0, 0.0;
  mx2 << 0.0, -1.0;
  msum << 1.0, 1.0;
  sd.u_rows.push_back({mx1, sigma, "x1 > -sigma"});
  sd.u_rows.push_back({mx2, sigma, "x2 > -sigma"});
  sd.u_rows.push_back({msum, b + sigma, "x1+x2 < bound+sigma"});
  sd.sigma = sigma;
  sd.v_lo = Vec::Constant(4, -0.1);
  sd.v_hi = Vec::Constant(4, 1.1);

  return ScaledFutileCycle{
      SlowFastSystem(2, 4, std::move(f0), std::move(g0), p.to_parameter_set(),
                     std::move(m0), std::move(jac)),
      std::move(domain), std::move(sd), p, A, b};
}

} // namespace

void FutileCycleParams::validate() const {
  const double rates[] = {k1, k_m1, k2, k3, k_m3, k4,
                          h1, h_m1, h2, h3, h_m3, h4};
  const char* names[] = {"k1", "k_m1", "k2", "k3", "k_m3", "k4",
                         "h1", "h_m1", "h2", "h3", "h_m3", "h4"};
  for (int i = 0; i < 12; ++i)
    if (!(rates[i] > 0.0) || !std::isfinite(rates[i]))
      throw ValidationError(std::string("rate constant ") + names[i] +
                            " must be positive");
  if (!(S_tot > 0.0) || !(E_tot > 0.0) || !(F_tot > 0.0))
    throw ValidationError("totals must be positive");
  if (!(eps() > 0.0) || eps() > eps0())
    throw ValidationError("eps = E_tot/S_tot = " + std::to_string(eps()) +
                          " must lie in (0, eps0] with eps0 = " +
                          std::to_string(eps0()));
}

ParameterSet FutileCycleParams::to_parameter_set() const {
  ParameterSet ps;
  ps.add("k1", k1);
  ps.add("k_m1", k_m1);
  ps.add("k2", k2);
  ps.add("k3", k3);
  ps.add("k_m3", k_m3);
  ps.add("k4", k4);
  ps.add("h1", h1);
  ps.add("h_m1", h_m1);
  ps.add("h2", h2);
  ps.add("h3", h3);
  ps.add("h_m3", h_m3);
  ps.add("h4", h4);
  ps.add("S_tot", S_tot);
  ps.add("E_tot", E_tot);
  ps.add("F_tot", F_tot);
  return ps;
}

FutileCycleParams FutileCycleParams::all_ones(double eps) {
  FutileCycleParams p{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1.0, eps, eps};
  p.validate();
  return p;
}

FutileCycleParams FutileCycleParams::bistable(double eps) {
  // zero-order regime: tight Michaelis constants (Km1 = Km3 = 0.1,
  // Km2 = Km4 = 0.2) with symmetric kinase/phosphatase branches; the
  // reduced system has two stable states and a saddle on the diagonal
  FutileCycleParams p{20, 1, 1, 20, 1, 3, 20, 1, 1, 20, 1, 3, 1.0, eps, eps};
  p.validate();
  return p;
}

FutileCycleParams FutileCycleParams::with_eps(double eps) const {
  FutileCycleParams p = *this;
  const double cc = c();
  p.E_tot = eps * S_tot;
  p.F_tot = cc * p.E_tot;
  p.validate();
  return p;
}

MassActionModel::MassActionModel(FutileCycleParams p) : p_(std::move(p)) {
  p_.validate();
}

Vec MassActionModel::recovered(const Vec& s) const {
  Vec r(3);
  r[0] = p_.S_tot - s[0] - s[1] - s[2] - s[3] - s[4] - s[5]; // S1
  r[1] = p_.E_tot - s[2] - s[3];                             // E
  r[2] = p_.F_tot - s[4] - s[5];                             // F
  return r;
}

Vec MassActionModel::rhs6(const Vec& s) const {
  const double S0 = s[0], S2 = s[1], C1 = s[2], C2 = s[3], C4 = s[4], C3 = s[5];
  const Vec rec = recovered(s);
  const double S1 = rec[0], E = rec[1], F = rec[2];
  Vec d(6);
  d[0] = p_.h4 * C4 - p_.k1 * S0 * E + p_.k_m1 * C1;
  d[1] = p_.k4 * C2 - p_.h1 * S2 * F + p_.h_m1 * C3;
  d[2] = p_.k1 * S0 * E - (p_.k_m1 + p_.k2) * C1;
  d[3] = p_.k3 * S1 * E - (p_.k_m3 + p_.k4) * C2;
  d[4] = p_.h3 * S1 * F - (p_.h_m3 + p_.h4) * C4;
  d[5] = p_.h1 * S2 * F - (p_.h_m1 + p_.h2) * C3;
  return d;
}

Vec MassActionModel::rhs9(const Vec& s) const {
  const double S0 = s[0], S1 = s[1], S2 = s[2], C1 = s[3], C2 = s[4],
               C3 = s[5], C4 = s[6], E = s[7], F = s[8];
  Vec d(9);
  d[0] = p_.h4 * C4 - p_.k1 * S0 * E + p_.k_m1 * C1;
  d[1] = p_.k2 * C1 + p_.k_m3 * C2 - p_.k3 * S1 * E + p_.h2 * C3 +
         p_.h_m3 * C4 - p_.h3 * S1 * F;
  d[2] = p_.k4 * C2 - p_.h1 * S2 * F + p_.h_m1 * C3;
  d[3] = p_.k1 * S0 * E - (p_.k_m1 + p_.k2) * C1;
  d[4] = p_.k3 * S1 * E - (p_.k_m3 + p_.k4) * C2;
  d[5] = p_.h1 * S2 * F - (p_.h_m1 + p_.h2) * C3;
  d[6] = p_.h3 * S1 * F - (p_.h_m3 + p_.h4) * C4;
  d[7] = -p_.k1 * S0 * E + (p_.k_m1 + p_.k2) * C1 - p_.k3 * S1 * E +
         (p_.k_m3 + p_.k4) * C2;
  d[8] = -p_.h1 * S2 * F + (p_.h_m1 + p_.h2) * C3 - p_.h3 * S1 * F +
         (p_.h_m3 + p_.h4) * C4;
  return d;
}

Vec MassActionModel::totals9(const Vec& s) const {
  Vec t(3);
  t[0] = s[0] + s[1] + s[2] + s[3] + s[4] + s[5] + s[6];
  t[1] = s[7] + s[3] + s[4];
  t[2] = s[8] + s[5] + s[6];
  return t;
}

Vec MassActionModel::expand(const Vec& s) const {
  const Vec rec = recovered(s);
  Vec s9(9);
  s9 << s[0], rec[0], s[1], s[2], s[3], s[5], s[4], rec[1], rec[2];
  return s9;
}

Vec MassActionModel::restrict_to6(const Vec& s9) const {
  Vec s(6);
  s << s9[0], s9[2], s9[3], s9[4], s9[6], s9[5];
  return s;
}

void MassActionModel::validate_initial(const Vec& s) const {
  if (s.size() != 6) throw InvalidStateError("mass-action state has 6 entries");
  const Vec rec = recovered(s);
  auto bad = [](double v) { return v < -1e-12 || !std::isfinite(v); };
  for (int i = 0; i < 6; ++i)
    if (bad(s[i]))
      throw InvalidStateError("negative concentration in mass-action state");
  if (bad(rec[0]) || bad(rec[1]) || bad(rec[2]))
    throw InvalidStateError(
        "conservation totals violated: a recovered concentration is negative");
}

OdeFn MassActionModel::ode6() const {
  MassActionModel self = *this;
  return [self](double, const Vec& v, Vec& dv) { dv = self.rhs6(v); };
}

OdeFn MassActionModel::ode9() const {
  MassActionModel self = *this;
  return [self](double, const Vec& v, Vec& dv) { dv = self.rhs9(v); };
}

MassActionModel futile_cycle_mass_action(const FutileCycleParams& p) {
  return MassActionModel(p);
}

ScaledFutileCycle futile_cycle_scaled(const FutileCycleParams& p) {
  return build_scaled(p, p.S_tot);
}

ScaledFutileCycle futile_cycle_scaled_with(const FutileCycleParams& p,
                                           double scale) {
  if (!(scale > 0.0)) throw ValidationError("scale must be positive");
  return build_scaled(p, scale);
}

Vec futile_cycle_m0(const FutileCycleParams& p, const Vec& x) {
  p.validate();
  return m0_general(p, p.S_tot, 1.0, x);
}

ReducedFutileCycle reduced_futile_cycle(const FutileCycleParams& p) {
  p.validate();
  ReducedFutileCycle red;
  red.params = p;
  red.bound = 1.0;
  const double c = p.c();
  red.field = [p, c](const Vec& x) {
    const auto d = denominators(p, p.S_tot, 1.0, x);
    if (!(d.D1 > 0.0) || !(d.D2 > 0.0))
      throw DomainError("reduced field denominator not positive: x outside U");
    Vec F(2);
    F[0] = -p.k2 * x[0] / d.D1 + p.h4 * c * (p.Km3() * d.r / p.Km4()) / d.D2;
    F[1] = -p.h2 * c * x[1] / d.D2 + p.k4 * (p.Km1() * d.r / p.Km2()) / d.D1;
    return F;
  };
  return red;
}

HurwitzBlocks hurwitz_blocks(const FutileCycleParams& p, const Vec& x) {
  const double S = p.S_tot;
  const double r = 1.0 - x[0] - x[1];
  HurwitzBlocks hb;
  hb.B1.resize(2, 2);
  hb.B1(0, 0) = -p.k1 * S * x[0] - (p.k_m1 + p.k2);
  hb.B1(0, 1) = -p.k1 * S * x[0];
  hb.B1(1, 0) = -p.k3 * S * r;
  hb.B1(1, 1) = -p.k3 * S * r - (p.k_m3 + p.k4);
  hb.B2.resize(2, 2);
  hb.B2(0, 0) = -p.h3 * S * r - (p.h_m3 + p.h4);
  hb.B2(0, 1) = -p.h3 * S * r;
  hb.B2(1, 0) = -p.h1 * S * x[1];
  hb.B2(1, 1) = -p.h1 * S * x[1] - (p.h_m1 + p.h2);
  hb.neg_trace1 = -hb.B1.trace();
  hb.det1 = hb.B1.determinant();
  hb.neg_trace2 = -hb.B2.trace();
  hb.det2 = hb.B2.determinant();
  hb.hurwitz = hb.neg_trace1 > 0.0 && hb.det1 > 0.0 && hb.neg_trace2 > 0.0 &&
               hb.det2 > 0.0;
  for (const Mat* B : {&hb.B1, &hb.B2}) {
    Eigen::EigenSolver<Mat> es(*B, false);
    for (Eigen::Index i = 0; i < 2; ++i)
      hb.eigenvalues.push_back(es.eigenvalues()[i]);
  }
  return hb;
}

std::vector<Vec> grid_over_K(const FutileCycleParams& p, int n) {
  if (n < 2) throw ValidationError("grid needs n >= 2");
  const double sigma = sigma_of(p, p.S_tot);
  const double lo = -sigma / 2.0, hi = 1.0 + sigma / 2.0;
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec x(2);
      x[0] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
      x[1] = lo + (hi - lo) * static_cast<double>(j) / (n - 1);
      if (x[0] + x[1] <= 1.0 + sigma / 2.0 + 1e-12) pts.push_back(x);
    }
  }
  return pts;
}

DerivedConstants derived_constants(const FutileCycleParams& p, int mu_grid) {
  p.validate();
  DerivedConstants dc;
  dc.Km1 = p.Km1();
  dc.Km2 = p.Km2();
  dc.Km3 = p.Km3();
  dc.Km4 = p.Km4();
  dc.sigma0 = sigma0_of(p, p.S_tot);
  dc.sigma = sigma_of(p, p.S_tot);
  dc.eps0 = p.eps0();
  dc.mu_grid = mu_grid;
  double mu = std::numeric_limits<double>::infinity();
  for (const Vec& x : grid_over_K(p, mu_grid)) {
    const HurwitzBlocks hb = hurwitz_blocks(p, x);
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& ev : hb.eigenvalues) max_re = std::max(max_re, ev.real());
    mu = std::min(mu, -max_re);
  }
  dc.mu = mu;
  return dc;
}

AlternativeScaling alternative_scaling(const FutileCycleParams& p) {
  p.validate();
  const double A = p.S_tot + p.Km1() + p.Km2() + p.Km3() + p.Km4();
  return AlternativeScaling{p.E_tot / A, A, futile_cycle_scaled_with(p, A)};
}

} // namespace slowfast::models
