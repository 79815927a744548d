#include "slowfast/monotone.hpp"

#include <algorithm>
#include <cmath>

namespace slowfast {

std::string to_string(ConeOrder o) {
  switch (o) {
    case ConeOrder::Unrelated: return "unrelated";
    case ConeOrder::Leq: return "leq";
    case ConeOrder::Strict: return "strict";
    case ConeOrder::Strong: return "strong";
  }
  return "unknown";
}

OrthantCone::OrthantCone(std::vector<int> signature) : signs_(std::move(signature)) {
  if (signs_.empty()) throw ValidationError("cone needs dimension >= 1");
  for (int s : signs_)
    if (s != 1 && s != -1)
      throw ValidationError("cone signature entries must be +1 or -1");
}

bool OrthantCone::contains(const Vec& v) const {
  if (v.size() != dim()) throw ValidationError("cone dimension mismatch");
  for (int i = 0; i < dim(); ++i)
    if (signs_[static_cast<std::size_t>(i)] * v[i] < 0.0) return false;
  return true;
}

bool OrthantCone::interior_contains(const Vec& v, double threshold) const {
  if (v.size() != dim()) throw ValidationError("cone dimension mismatch");
  for (int i = 0; i < dim(); ++i)
    if (!(signs_[static_cast<std::size_t>(i)] * v[i] > threshold)) return false;
  return true;
}

std::vector<Vec> OrthantCone::generators() const {
  std::vector<Vec> g;
  for (int i = 0; i < dim(); ++i) {
    Vec e = Vec::Zero(dim());
    e[i] = static_cast<double>(signs_[static_cast<std::size_t>(i)]);
    g.push_back(e);
  }
  return g;
}

std::vector<Vec> OrthantCone::dual_generators() const {
  // for orthants the dual generators coincide with the primal ones as rows
  return generators();
}

Mat OrthantCone::conjugate(const Mat& M) const {
  Mat out = M;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      out(i, j) = signs_[static_cast<std::size_t>(i)] * M(i, j) *
                  signs_[static_cast<std::size_t>(j)];
  return out;
}

Vec OrthantCone::conjugate(const Vec& v) const {
  Vec out = v;
  for (int i = 0; i < dim(); ++i)
    out[i] = signs_[static_cast<std::size_t>(i)] * v[i];
  return out;
}

ConeOrder cone_leq(const OrthantCone& cone, const Vec& u, const Vec& v,
                   double interior_threshold) {
  if (u.size() != v.size() || u.size() != cone.dim())
    throw ValidationError("cone_leq dimension mismatch");
  const Vec d = v - u;
  if (cone.interior_contains(d, interior_threshold)) return ConeOrder::Strong;
  if (!cone.contains(d)) return ConeOrder::Unrelated;
  return d.isZero(0.0) ? ConeOrder::Leq : ConeOrder::Strict;
}

KamkeReport kamke_check(const FieldFn& field, const std::vector<Vec>& points,
                        const OrthantCone& cone, bool strict) {
  KamkeReport rep;
  rep.strict = strict;
  rep.points = points;
  rep.min_off_diagonal = std::numeric_limits<double>::infinity();
  const int N = cone.dim();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec& z = points[p];
    Mat J(N, N);
    Vec zp = z, zm = z;
    for (int j = 0; j < N; ++j) {
      const double h = std::max(1e-6, 1e-6 * std::abs(z[j]));
      zp[j] = z[j] + h;
      zm[j] = z[j] - h;
      const Vec fp = field(zp), fm = field(zm);
      if (!all_finite(fp) || !all_finite(fm))
        throw Error("non-finite field evaluation in Kamke check");
      J.col(j) = (fp - fm) / (2.0 * h);
      zp[j] = z[j];
      zm[j] = z[j];
    }
    Mat Jc = cone.conjugate(J);
    rep.conjugated_jacobians.push_back(Jc);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (i == j) continue;
        const double v = Jc(i, j);
        rep.min_off_diagonal = std::min(rep.min_off_diagonal, v);
        const bool ok = strict ? (v > 0.0) : (v >= 0.0);
        if (!ok)
          rep.violations.push_back({static_cast<int>(p), i, j, v});
      }
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

EpdReport eventually_positive_derivatives(
    const FieldFn& field, const OrthantCone& cone, const std::vector<Vec>& samples,
    const std::vector<double>& t_grid, const IntegratorConfig& cfg,
    const Vec& box_lo, const Vec& box_hi, double positivity_threshold) {
  if (t_grid.empty()) throw ValidationError("EPD needs a nonempty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ValidationError("EPD time grid must be strictly increasing");
  if (!(t_grid.front() > 0.0))
    throw ValidationError("EPD grid times must be positive");

  OdeFn ode = [&field](double, const Vec& v, Vec& dv) { dv = field(v); };
  const bool has_box = box_lo.size() > 0;

  EpdReport rep;
  rep.t_grid = t_grid;
  rep.values.resize(samples.size());

  for (std::size_t s = 0; s < samples.size(); ++s) {
    VariationalResult vr = integrate_variational(
        ode, std::nullopt, samples[s], 0.0, t_grid.back(), cfg, t_grid);
    bool escaped = vr.trajectory.status != TrajStatus::Completed;
    if (has_box && !escaped) {
      for (const Vec& st : vr.trajectory.states) {
        for (Eigen::Index i = 0; i < st.size(); ++i)
          if (st[i] < box_lo[i] || st[i] > box_hi[i]) escaped = true;
      }
    }
    if (escaped || vr.flow_jacobians.size() != t_grid.size()) {
      rep.escaped_samples.push_back(static_cast<int>(s));
      continue;
    }
    for (const Mat& M : vr.flow_jacobians)
      rep.values[s].push_back(cone.conjugate(M));
  }

  // earliest grid index from which every recorded entry stays positive
  const std::size_t T = t_grid.size();
  std::vector<double> min_at(T, std::numeric_limits<double>::infinity());
  bool any_sample = false;
  for (const auto& per_sample : rep.values) {
    if (per_sample.empty()) continue;
    any_sample = true;
    for (std::size_t k = 0; k < T; ++k)
      min_at[k] = std::min(min_at[k], per_sample[k].minCoeff());
  }
  rep.achieved = false;
  if (any_sample) {
    std::size_t k0 = T;
    for (std::size_t k = T; k-- > 0;) {
      if (min_at[k] > positivity_threshold)
        k0 = k;
      else
        break;
    }
    if (k0 < T) {
      rep.achieved = true;
      rep.t0 = t_grid[k0];
      rep.margin_after_t0 = *std::min_element(min_at.begin() + static_cast<long>(k0),
                                              min_at.end());
    }
  }
  return rep;
}

std::vector<OrderPreservationCase> monotone_order_preservation_test(
    const FieldFn& field, const OrthantCone& cone,
    const std::vector<std::pair<Vec, Vec>>& pairs, double t,
    const IntegratorConfig& cfg, bool strong, double interior_threshold) {
  OdeFn ode = [&field](double, const Vec& v, Vec& dv) { dv = field(v); };
  std::vector<OrderPreservationCase> out;
  for (const auto& [u, v] : pairs) {
    OrderPreservationCase c;
    c.u = u;
    c.v = v;
    const ConeOrder initial = cone_leq(cone, u, v, interior_threshold);
    c.ordered_initially = initial != ConeOrder::Unrelated;
    if (t == 0.0) {
      c.final_order = initial;
      c.preserved = c.ordered_initially;
      out.push_back(c);
      continue;
    }
    Trajectory tu = integrate(ode, u, 0.0, t, cfg);
    Trajectory tv = integrate(ode, v, 0.0, t, cfg);
    if (tu.status != TrajStatus::Completed || tv.status != TrajStatus::Completed) {
      c.preserved = false;
      out.push_back(c);
      continue;
    }
    c.final_order = cone_leq(cone, tu.final_state(), tv.final_state(),
                             interior_threshold);
    if (strong)
      c.preserved = c.final_order == ConeOrder::Strong;
    else
      c.preserved = c.final_order != ConeOrder::Unrelated;
    out.push_back(c);
  }
  return out;
}

} // namespace slowfast
