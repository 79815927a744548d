#ifndef SLOWFAST_DOMAIN_HPP
#define SLOWFAST_DOMAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slowfast/types.hpp"

namespace slowfast {

/// One inequality (a0 + eps*a1) . v <= b0 + eps*b1. Both the row and the
/// offset are affine in eps, which captures eps-varying polytopes like
/// simplex constraints whose coefficients carry an eps factor.
struct EpsAffineRow {
  Vec a0;
  Vec a1;
  double b0 = 0.0;
  double b1 = 0.0;
  std::string label;

  Vec row(double eps) const { return a0 + eps * a1; }
  double offset(double eps) const { return b0 + eps * b1; }
};

struct ContainmentResult {
  bool inside = false;
  /// min over rows of offset - row.v; negative when outside.
  double margin = 0.0;
  int worst_row = -1;
};

/// Convex polytope family D_eps described by eps-affine inequalities, valid
/// for eps in (eps_min, eps_max]. A sampling bounding box (and a feasible
/// seed point) is supplied by the model that builds the polytope; no LP is
/// run to derive them.
class EpsPolytope {
public:
  EpsPolytope(std::vector<EpsAffineRow> rows, double eps_min, double eps_max,
              Vec box_lo, Vec box_hi, Vec interior_seed);

  int dim() const { return static_cast<int>(box_lo_.size()); }
  const std::vector<EpsAffineRow>& rows() const { return rows_; }
  double eps_min() const { return eps_min_; }
  double eps_max() const { return eps_max_; }
  const Vec& box_lo() const { return box_lo_; }
  const Vec& box_hi() const { return box_hi_; }
  const Vec& interior_seed() const { return interior_seed_; }

  /// Throws DomainUndefinedError for eps outside the validity interval.
  void require_valid_eps(double eps) const;

  /// Membership plus worst margin: inside iff every inequality holds.
  ContainmentResult contains(const Vec& v, double eps) const;

  /// Analytic center: minimizer of -sum log slack, by damped Newton from the
  /// stored interior seed.
  Vec analytic_center(double eps) const;

  /// Rejection-samples a uniform point from the bounding box until it lands
  /// inside; `attempts` reports how many draws were used.
  Vec sample(double eps, std::uint64_t& rng_state, int* attempts = nullptr) const;

  /// A point on the boundary: walks from an interior point along the outward
  /// normal of a chosen row until the first facet is hit. Returns the point
  /// and the index of the active facet.
  std::pair<Vec, int> boundary_point(double eps, const Vec& from,
                                     int toward_row) const;

private:
  std::vector<EpsAffineRow> rows_;
  double eps_min_, eps_max_;
  Vec box_lo_, box_hi_, interior_seed_;
};

/// Strict linear inequality a . x < b describing the open slow set U.
struct StrictRow {
  Vec a;
  double b = 0.0;
  std::string label;
};

/// The open slow-variable set U (strict inequalities carrying the margin
/// sigma) together with the fast bounding box V (a padded axis box) that
/// encloses the fast projection of D_eps.
struct SlowDomain {
  std::vector<StrictRow> u_rows;
  Vec v_lo, v_hi;
  double sigma = 0.0;

  bool contains_x(const Vec& x) const {
    for (const auto& r : u_rows)
      if (!(r.a.dot(x) < r.b)) return false;
    return true;
  }
  bool contains_y(const Vec& y) const {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] < v_lo[i] || y[i] > v_hi[i]) return false;
    return true;
  }
};

/// splitmix64 step; the shared deterministic RNG primitive of the library.
std::uint64_t splitmix64(std::uint64_t& state);
/// Uniform double in [0, 1).
double uniform01(std::uint64_t& state);
/// Decorrelated per-stream seed for sample index i under a master seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t i);

} // namespace slowfast

#endif
