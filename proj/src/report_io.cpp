#include "slowfast/report_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace slowfast {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

njson to_json(const Vec& v) {
  njson a = njson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

njson to_json(const Equilibrium& eq) {
  njson j;
  j["location"] = to_json(eq.location);
  j["residual"] = eq.residual;
  njson evs = njson::array();
  for (const auto& ev : eq.eigenvalues)
    evs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  j["eigenvalues"] = evs;
  j["classification"] = to_string(eq.classification);
  j["degenerate"] = eq.degenerate;
  return j;
}

njson to_json(const ManifoldErrorReport& rep) {
  njson j;
  j["eps_list"] = rep.eps_list;
  j["sup_errors"] = rep.sup_errors;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["slope_defined"] = rep.slope_defined;
  if (!rep.slope_defined) j["flag"] = "insufficient-points";
  return j;
}

njson to_json(const PhaseTrackingReport& rep) {
  njson j;
  j["times"] = rep.times;
  j["distances"] = rep.distances;
  j["fitted_rate"] = rep.fitted_rate;
  j["rate_defined"] = rep.rate_defined;
  j["initial_distance"] = rep.initial_distance;
  j["final_distance"] = rep.final_distance;
  j["used_correction"] = rep.used_correction;
  j["fit_floor"] = rep.fit_floor;
  return j;
}

njson to_json(const CensusReport& rep) {
  njson j;
  j["eps"] = rep.eps;
  j["sample_count"] = rep.n_samples;
  j["converged_count"] = rep.converged;
  j["converged_fraction"] =
      static_cast<double>(rep.converged) / std::max(1, rep.n_samples);
  njson eqs = njson::array();
  for (const auto& e : rep.equilibria) eqs.push_back(to_json(e));
  j["equilibria"] = eqs;
  j["basin_tallies"] = rep.basin_tallies;
  j["non_converged"] = rep.non_converged;
  j["horizon"] = rep.horizon;
  j["tolerances"] = {{"tol", rep.tol}, {"rtol", rep.rtol}, {"atol", rep.atol}};
  j["acceptance_rate"] = rep.acceptance_rate;
  j["seed"] = rep.seed;
  return j;
}

njson to_json(const LimitCycleReport& rep) {
  njson j;
  j["section"] = rep.section;
  njson cr = njson::array();
  for (const auto& c : rep.crossings)
    cr.push_back({{"t", c.t}, {"state", to_json(c.state)}});
  j["crossings"] = cr;
  j["fixed_point"] = rep.fixed_point.size() > 0 ? to_json(rep.fixed_point)
                                                : njson(nullptr);
  j["period"] = rep.period;
  j["amplitude"] = rep.amplitude;
  j["verdict"] = to_string(rep.verdict);
  return j;
}

njson to_json(const KamkeReport& rep) {
  njson j;
  j["strict"] = rep.strict;
  j["pass"] = rep.pass;
  j["sample_count"] = rep.points.size();
  j["min_off_diagonal"] = rep.min_off_diagonal;
  njson viol = njson::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"point_index", v.point_index},
                    {"point", to_json(rep.points[static_cast<std::size_t>(
                                  v.point_index)])},
                    {"entry", {v.row, v.col}},
                    {"value", v.value}});
  j["violations"] = viol;
  return j;
}

njson to_json(const EpdReport& rep) {
  njson j;
  j["t_grid"] = rep.t_grid;
  j["achieved"] = rep.achieved;
  j["t0"] = rep.achieved ? njson(rep.t0) : njson(nullptr);
  j["margin_after_t0"] = rep.margin_after_t0;
  j["escaped_samples"] = rep.escaped_samples;
  njson vals = njson::array();
  for (const auto& per_sample : rep.values) {
    njson sample_vals = njson::array();
    for (const auto& M : per_sample) {
      njson rows = njson::array();
      for (Eigen::Index r = 0; r < M.rows(); ++r) {
        njson row = njson::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
      }
      sample_vals.push_back(rows);
    }
    vals.push_back(sample_vals);
  }
  j["conjugated_flow_derivatives"] = vals;
  return j;
}

njson to_json(const models::AssumptionReport& rep) {
  njson j;
  njson entries = njson::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"name", e.name},
                       {"status", models::to_string(e.status)},
                       {"evidence", e.evidence}});
  j["assumptions"] = entries;
  j["all_ok"] = rep.all_ok();
  return j;
}

std::string trajectory_csv(const Trajectory& tr, int n, int m) {
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",y" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    out += format_double(tr.times[k]);
    const Vec& v = tr.states[k];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out += ",";
      out += format_double(v[i]);
    }
    out += "\n";
  }
  return out;
}

std::string manifold_error_csv(const ManifoldErrorReport& rep) {
  std::string out = "eps,sup_error\n";
  for (std::size_t i = 0; i < rep.eps_list.size(); ++i)
    out += format_double(rep.eps_list[i]) + "," +
           format_double(rep.sup_errors[i]) + "\n";
  return out;
}

std::string census_csv(const CensusReport& rep) {
  std::string out = "index";
  const auto dim = rep.samples.empty() ? 0 : rep.samples[0].initial.size();
  for (Eigen::Index i = 0; i < dim; ++i)
    out += ",initial_" + std::to_string(i + 1);
  out += ",outcome";
  for (Eigen::Index i = 0; i < dim; ++i)
    out += ",terminal_" + std::to_string(i + 1);
  out += "\n";
  for (const auto& s : rep.samples) {
    out += std::to_string(s.index);
    for (Eigen::Index i = 0; i < s.initial.size(); ++i)
      out += "," + format_double(s.initial[i]);
    out += s.converged ? ",equilibrium-" + std::to_string(s.equilibrium)
                       : ",non-converged:" + s.reason;
    for (Eigen::Index i = 0; i < s.terminal.size(); ++i)
      out += "," + format_double(s.terminal[i]);
    out += "\n";
  }
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp =
      target.parent_path() /
      (target.filename().string() + ".tmp-" +
       std::to_string(static_cast<unsigned long>(::getpid())));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

} // namespace slowfast
