#ifndef SLOWFAST_MODELS_AUDIT_HPP
#define SLOWFAST_MODELS_AUDIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "slowfast/integrate.hpp"
#include "slowfast/models/counterexample.hpp"
#include "slowfast/models/futile_cycle.hpp"

namespace slowfast::models {

enum class AssumptionStatus {
  VerifiedNumerically,
  VerifiedAnalytically,
  Cited,
  Failed
};

std::string to_string(AssumptionStatus s);

struct AssumptionEntry {
  std::string name;  ///< "A1" .. "A7"
  AssumptionStatus status = AssumptionStatus::Failed;
  nlohmann::ordered_json evidence;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;  ///< exactly A1..A7, in order
  bool all_ok() const {
    for (const auto& e : entries)
      if (e.status == AssumptionStatus::Failed) return false;
    return true;
  }
  const AssumptionEntry& entry(const std::string& name) const;
};

struct AuditConfig {
  double eps = 0.1;          ///< eps at which D_eps checks run
  int manifold_samples = 1000;
  int hurwitz_grid = 50;
  int boundary_samples = 1000;
  int kamke_samples = 1000;
  int epd_samples = 20;
  std::vector<double> epd_t_grid = {0.5, 1.0, 2.0, 5.0, 10.0};
  double interior_margin = 1e-3;
  std::uint64_t seed = 0;
  IntegratorConfig integ;
  /// Optional override of the Hurwitz grid; points outside U are excluded
  /// and listed in the evidence.
  std::vector<Vec> hurwitz_points;
};

/// Checks A1-A7 for the scaled futile cycle: residual of the closed-form
/// manifold (A2), Hurwitz blocks on the K grid (A4, and A3 through the
/// linearity of the frozen fast system), inward-pointing boundary sampling
/// (A5), Kamke and eventually-positive-derivative certificates on the
/// reduced system (A6), and the nullcline-oracle equilibrium count (A7).
/// Smoothness (A1) and the finiteness proof behind A7 are cited.
AssumptionReport audit_futile_cycle(const FutileCycleParams& p,
                                    const AuditConfig& cfg);

AssumptionReport audit_counterexample(const CounterexampleParams& cp,
                                      const AuditConfig& cfg);

} // namespace slowfast::models

#endif
