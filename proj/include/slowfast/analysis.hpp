#ifndef SLOWFAST_ANALYSIS_HPP
#define SLOWFAST_ANALYSIS_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/integrate.hpp"
#include "slowfast/models/futile_cycle.hpp"
#include "slowfast/monotone.hpp"
#include "slowfast/newton.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

enum class EqClass {
  StableNode,
  StableFocus,
  Saddle,
  UnstableNode,
  UnstableFocus,
  CenterMarginal,
  Unclassified
};

std::string to_string(EqClass c);

struct Equilibrium {
  Vec location;
  double residual = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  EqClass classification = EqClass::Unclassified;
  bool degenerate = false;  ///< Jacobian numerically singular at the root
};

struct EquilibriumSearchConfig {
  NewtonConfig newton{1e-12, 50, 1.0 / 1024.0};
  double residual_accept = 1e-10;
  double dedupe_radius = 1e-6;
};

/// Damped Newton from every seed; converged roots inside the domain are
/// re-verified against residual_accept, deduplicated, and kept (flagged
/// degenerate when the Jacobian is singular there).
std::vector<Equilibrium> find_equilibria(
    const FieldFn& field, const std::vector<Vec>& seeds,
    const std::function<bool(const Vec&)>& in_domain = nullptr,
    const EquilibriumSearchConfig& cfg = {});

/// Fills eigenvalues and the classification from the Jacobian at the root;
/// real parts within `threshold` of zero give CenterMarginal.
void classify(const FieldFn& field, Equilibrium& eq, double threshold = 1e-8);

/// Marks grid cells of [lo, hi] where both field components change sign and
/// returns the cell centers as Newton seeds. Cells whose corners cannot be
/// evaluated (outside the field's domain) are skipped.
std::vector<Vec> nullcline_scan(const FieldFn& planar_field, const Vec& lo,
                                const Vec& hi, int resolution);

/// nullcline_scan followed by Newton and deduplication; the count of
/// distinct converged roots is the oracle equilibrium count.
std::vector<Equilibrium> nullcline_equilibria(
    const FieldFn& planar_field, const Vec& lo, const Vec& hi, int resolution,
    const std::function<bool(const Vec&)>& in_domain = nullptr,
    const EquilibriumSearchConfig& cfg = {});

struct CensusConfig {
  int n_samples = 1000;
  double horizon = 100.0;
  double tol = 1e-6;             ///< field-norm threshold of convergence
  double eq_radius_factor = 1e3; ///< converged when within factor*tol of a root
  std::uint64_t seed = 0;
  int workers = 1;
  IntegratorConfig integ;
};

struct CensusSample {
  int index = 0;
  Vec initial;
  Vec terminal;
  int equilibrium = -1;  ///< index into the equilibrium list, -1 if none
  bool converged = false;
  std::string reason;    ///< failure flag for non-converged samples
};

struct CensusReport {
  double eps = 0.0;
  int n_samples = 0;
  int converged = 0;
  std::vector<long> basin_tallies;
  std::vector<CensusSample> samples;
  std::vector<int> non_converged;  ///< indices
  double horizon = 0.0;
  double tol = 0.0;
  double rtol = 0.0, atol = 0.0;
  double acceptance_rate = 0.0;  ///< of the rejection sampler
  std::uint64_t seed = 0;
  std::vector<Vec> equilibria;
};

/// Seeded uniform census over D_eps: each sample integrates the slow-time
/// field until the state is both field-quiet (|field| < tol) and near a
/// known equilibrium, or the horizon is reached. Deterministic under a
/// fixed seed independent of worker count: sample i draws from its own
/// stream and results merge by index.
CensusReport convergence_census(const SlowFastSystem& sys, const EpsPolytope& dom,
                                double eps, const std::vector<Equilibrium>& eqs,
                                const CensusConfig& cfg);

/// Reduced-system roots (nullcline oracle) lifted through m0 and Newton-
/// refined on the full system at the given eps; classification from the
/// slow-time Jacobian.
std::vector<Equilibrium> lifted_equilibria(const models::ScaledFutileCycle& model,
                                           double eps, int scan_resolution = 500);

enum class CycleVerdict { CycleFound, ConvergedToEquilibrium, Inconclusive };

std::string to_string(CycleVerdict v);

struct LimitCycleConfig {
  int min_crossings = 20;
  int max_crossings = 200;
  double horizon = 2000.0;
  double crossing_tol = 1e-6;   ///< successive-crossing agreement
  double eq_exclusion = 1e-3;   ///< fixed point must be this far from roots
  IntegratorConfig integ;
};

struct LimitCycleReport {
  std::string section;
  std::vector<Crossing> crossings;
  Vec fixed_point;
  double period = 0.0;
  double amplitude = 0.0;
  CycleVerdict verdict = CycleVerdict::Inconclusive;
};

/// Poincare-section evidence for a periodic orbit: integrates until the
/// return map settles. CycleFound needs the last five crossings pairwise
/// within crossing_tol, all at least eq_exclusion from every equilibrium,
/// and an amplitude above 10x crossing_tol.
LimitCycleReport detect_limit_cycle(const FieldFn& field, const Vec& s0,
                                    const EventSpec& section,
                                    const std::string& section_desc,
                                    const LimitCycleConfig& cfg,
                                    const std::vector<Equilibrium>& eqs);

} // namespace slowfast

#endif
