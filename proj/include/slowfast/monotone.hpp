#ifndef SLOWFAST_MONOTONE_HPP
#define SLOWFAST_MONOTONE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "slowfast/integrate.hpp"
#include "slowfast/types.hpp"

namespace slowfast {

/// Plain vector field on R^N used by the monotonicity certificates.
using FieldFn = std::function<Vec(const Vec&)>;

enum class ConeOrder { Unrelated, Leq, Strict, Strong };

std::string to_string(ConeOrder o);

/// Orthant cone C = {v : s_i v_i >= 0 for all i} for a sign vector s.
class OrthantCone {
public:
  explicit OrthantCone(std::vector<int> signature);

  int dim() const { return static_cast<int>(signs_.size()); }
  const std::vector<int>& signature() const { return signs_; }

  bool contains(const Vec& v) const;
  /// Interior test with a strict positivity threshold (floating point
  /// cannot witness exact openness).
  bool interior_contains(const Vec& v, double threshold = 1e-12) const;

  /// Signed unit vectors s_i e_i; they generate the cone.
  std::vector<Vec> generators() const;

  /// Dual generators as row functionals lambda_i(v) = s_i v_i; for an
  /// orthant these generate the dual cone.
  std::vector<Vec> dual_generators() const;

  /// diag(s) conjugation, the change of basis sending C to the positive
  /// orthant: entry (i,j) of the result is s_i M_ij s_j.
  Mat conjugate(const Mat& M) const;
  Vec conjugate(const Vec& v) const;

private:
  std::vector<int> signs_;
};

/// Order of u against v: Strong when v - u is interior, Strict when it is a
/// nonzero cone vector, Leq when u = v, Unrelated otherwise.
ConeOrder cone_leq(const OrthantCone& cone, const Vec& u, const Vec& v,
                   double interior_threshold = 1e-12);

struct KamkeViolation {
  int point_index = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct KamkeReport {
  std::vector<Vec> points;
  /// Per point, the conjugated Jacobian diag(s) J diag(s).
  std::vector<Mat> conjugated_jacobians;
  std::vector<KamkeViolation> violations;
  bool strict = false;
  bool pass = false;
  /// Smallest off-diagonal conjugated entry seen across all points.
  double min_off_diagonal = 0.0;
};

/// Kamke sign certificate: at each sample the off-diagonal entries of
/// diag(s) J diag(s) must be >= 0 (> 0 in the strict variant). Jacobians by
/// central finite differences of the field.
KamkeReport kamke_check(const FieldFn& field, const std::vector<Vec>& points,
                        const OrthantCone& cone, bool strict);

struct EpdReport {
  std::vector<double> t_grid;
  /// values[sample][time] = conjugated flow derivative diag(s) Dphi_t diag(s);
  /// all entries positive means every dual functional is positive on the
  /// image of every cone generator.
  std::vector<std::vector<Mat>> values;
  std::vector<int> escaped_samples;
  double t0 = 0.0;
  bool achieved = false;
  /// min entry over all samples and grid times >= t0.
  double margin_after_t0 = 0.0;
};

/// Test for eventually positive derivatives: integrates the variational flow
/// from each sample and records lambda_i(Dphi_t e_j) over the time grid; t0
/// is the earliest grid time from which all values stay positive. Samples
/// whose trajectory leaves the optional box are flagged and excluded.
EpdReport eventually_positive_derivatives(
    const FieldFn& field, const OrthantCone& cone, const std::vector<Vec>& samples,
    const std::vector<double>& t_grid, const IntegratorConfig& cfg,
    const Vec& box_lo = Vec(), const Vec& box_hi = Vec(),
    double positivity_threshold = 1e-12);

struct OrderPreservationCase {
  Vec u, v;
  bool ordered_initially = false;
  bool preserved = false;
  ConeOrder final_order = ConeOrder::Unrelated;
};

/// Integrates both members of each ordered pair to time t and checks that
/// the flow preserves the cone order (interior order in the strong variant).
std::vector<OrderPreservationCase> monotone_order_preservation_test(
    const FieldFn& field, const OrthantCone& cone,
    const std::vector<std::pair<Vec, Vec>>& pairs, double t,
    const IntegratorConfig& cfg, bool strong,
    double interior_threshold = 1e-12);

} // namespace slowfast

#endif
