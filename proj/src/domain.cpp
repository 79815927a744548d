#include "slowfast/domain.hpp"

#include <cmath>
#include <limits>

namespace slowfast {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t i) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL * (i + 1));
  // one scrambling round so consecutive streams are decorrelated
  (void)splitmix64(s);
  return s;
}

EpsPolytope::EpsPolytope(std::vector<EpsAffineRow> rows, double eps_min,
                         double eps_max, Vec box_lo, Vec box_hi, Vec interior_seed)
    : rows_(std::move(rows)), eps_min_(eps_min), eps_max_(eps_max),
      box_lo_(std::move(box_lo)), box_hi_(std::move(box_hi)),
      interior_seed_(std::move(interior_seed)) {
  if (rows_.empty()) throw ValidationError("polytope needs at least one row");
  const auto d = box_lo_.size();
  if (box_hi_.size() != d || interior_seed_.size() != d)
    throw ValidationError("polytope box/seed dimension mismatch");
  for (const auto& r : rows_)
    if (r.a0.size() != d || r.a1.size() != d)
      throw ValidationError("polytope row dimension mismatch");
  if (!(eps_max_ > eps_min_))
    throw ValidationError("polytope eps interval is empty");
}

void EpsPolytope::require_valid_eps(double eps) const {
  if (!(eps > eps_min_) || !(eps <= eps_max_))
    throw DomainUndefinedError("eps = " + std::to_string(eps) +
                               " outside the domain validity interval (" +
                               std::to_string(eps_min_) + ", " +
                               std::to_string(eps_max_) + "]");
}

ContainmentResult EpsPolytope::contains(const Vec& v, double eps) const {
  require_valid_eps(eps);
  ContainmentResult res;
  res.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double slack = rows_[i].offset(eps) - rows_[i].row(eps).dot(v);
    if (slack < res.margin) {
      res.margin = slack;
      res.worst_row = static_cast<int>(i);
    }
  }
  res.inside = res.margin >= 0.0;
  return res;
}

Vec EpsPolytope::analytic_center(double eps) const {
  require_valid_eps(eps);
  Vec v = interior_seed_;
  const int d = dim();
  for (int iter = 0; iter < 100; ++iter) {
    Vec grad = Vec::Zero(d);
    Mat hess = Mat::Zero(d, d);
    for (const auto& r : rows_) {
      const Vec a = r.row(eps);
      const double s = r.offset(eps) - a.dot(v);
      if (!(s > 0.0)) throw Error("analytic-center iterate left the polytope");
      grad += a / s;
      hess += (a * a.transpose()) / (s * s);
    }
    Vec step = hess.ldlt().solve(-grad);
    // damp so every slack stays positive
    double alpha = 1.0;
    for (const auto& r : rows_) {
      const Vec a = r.row(eps);
      const double s = r.offset(eps) - a.dot(v);
      const double ds = a.dot(step);
      if (ds > 0.0) alpha = std::min(alpha, 0.9 * s / ds);
    }
    v += alpha * step;
    if (step.norm() * alpha < 1e-12) break;
  }
  return v;
}

Vec EpsPolytope::sample(double eps, std::uint64_t& rng_state, int* attempts) const {
  require_valid_eps(eps);
  const int d = dim();
  Vec v(d);
  for (int tries = 1; tries <= 1000000; ++tries) {
    for (int i = 0; i < d; ++i)
      v[i] = box_lo_[i] + (box_hi_[i] - box_lo_[i]) * uniform01(rng_state);
    if (contains(v, eps).inside) {
      if (attempts) *attempts = tries;
      return v;
    }
  }
  throw Error("rejection sampling failed: polytope too thin in its box");
}

std::pair<Vec, int> EpsPolytope::boundary_point(double eps, const Vec& from,
                                                int toward_row) const {
  require_valid_eps(eps);
  const Vec dir = rows_[static_cast<std::size_t>(toward_row)].row(eps).normalized();
  double t_hit = std::numeric_limits<double>::infinity();
  int facet = -1;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Vec a = rows_[i].row(eps);
    const double denom = a.dot(dir);
    if (denom <= 1e-14) continue;
    const double t = (rows_[i].offset(eps) - a.dot(from)) / denom;
    if (t >= 0.0 && t < t_hit) {
      t_hit = t;
      facet = static_cast<int>(i);
    }
  }
  if (facet < 0) throw Error("no facet hit: point escapes the polytope box");
  return {from + t_hit * dir, facet};
}

} // namespace slowfast
