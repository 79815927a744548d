#ifndef SLOWFAST_REPORT_IO_HPP
#define SLOWFAST_REPORT_IO_HPP

#include <string>

#include <json.hpp>

#include "slowfast/analysis.hpp"
#include "slowfast/manifold.hpp"
#include "slowfast/models/audit.hpp"
#include "slowfast/monotone.hpp"

namespace slowfast {

using njson = nlohmann::ordered_json;

njson to_json(const Vec& v);
njson to_json(const Equilibrium& eq);
njson to_json(const ManifoldErrorReport& rep);
njson to_json(const PhaseTrackingReport& rep);
njson to_json(const CensusReport& rep);
njson to_json(const LimitCycleReport& rep);
njson to_json(const KamkeReport& rep);
njson to_json(const EpdReport& rep);
njson to_json(const models::AssumptionReport& rep);

/// Trajectory CSV: header t,x1..xn,y1..ym, one full-precision row per time.
std::string trajectory_csv(const Trajectory& tr, int n, int m);
/// (eps, sup_error) pairs for plotting.
std::string manifold_error_csv(const ManifoldErrorReport& rep);
/// (sample index, initial state, outcome, terminal state) per census sample.
std::string census_csv(const CensusReport& rep);

/// Full-precision decimal formatting (round-trips doubles).
std::string format_double(double v);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file. Creates parent directories.
void atomic_write_file(const std::string& path, const std::string& content);

/// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

} // namespace slowfast

#endif
