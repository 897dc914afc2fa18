#include "kscluster/report.hpp"

#include <cmath>
#include <cstdio>

#ifndef KSCLUSTER_VERSION
#define KSCLUSTER_VERSION "0.0.0"
#endif

namespace kscluster::report {

using nlohmann::json;

std::string version() { return KSCLUSTER_VERSION; }

std::string format_sig9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string criteria_csv_header() { return "model_id,criterion,z_max,optimal_param,attained,strict,evaluations"; }

std::string criteria_csv_row(const criteria::CriterionReport& r) {
  int evals = r.diagnostics ? r.diagnostics->evaluations : 0;
  return r.model_id + "," + r.criterion + "," + format_sig9(r.z_max) + "," + format_sig9(r.optimal_param) + "," +
         (r.attained ? "true" : "false") + "," + (r.strict ? "true" : "false") + "," + std::to_string(evals);
}

json criterion_json(const criteria::CriterionReport& r) {
  json j = {{"criterion", r.criterion}, {"model_id", r.model_id},   {"z_max", r.z_max},
            {"optimal_param", r.optimal_param}, {"param_name", r.param_name}, {"attained", r.attained},
            {"strict", r.strict}};
  if (r.feasible_at) {
    const auto& v = r.feasible_at->verdict;
    j["feasible_at"] = {{"z", r.feasible_at->z}, {"holds", v.holds}, {"lhs", v.lhs}, {"rhs", v.rhs}};
  }
  if (r.diagnostics) {
    const auto& d = *r.diagnostics;
    j["diagnostics"] = {{"evaluations", d.evaluations}, {"bracket", {d.bracket_lo, d.bracket_hi}},
                        {"tolerance", d.tolerance},     {"hit_ceiling", d.hit_ceiling},
                        {"reseeded", d.reseeded}};
  } else {
    j["diagnostics"] = nullptr;
  }
  return j;
}

json suite_json(const suites::SuiteResult& r) {
  json j = {{"suite", r.name}, {"ok", r.ok}, {"checks", r.checks}, {"stats", r.stats}};
  j["counterexample"] = r.counterexample ? *r.counterexample : json(nullptr);
  return j;
}

json envelope(const std::string& command, const std::string& digest) {
  return {{"schema", 1}, {"tool", "kscluster"}, {"version", version()}, {"command", command},
          {"config_digest", digest}};
}

}  // namespace kscluster::report
