#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kscluster/criteria.hpp"
#include "kscluster/suites.hpp"

namespace kscluster::report {

std::string version();

// CSV header: model_id,criterion,z_max,optimal_param,attained,strict,evaluations
std::string criteria_csv_header();
std::string criteria_csv_row(const criteria::CriterionReport& r);
nlohmann::json criterion_json(const criteria::CriterionReport& r);
nlohmann::json suite_json(const suites::SuiteResult& r);

// 9 significant digits.
std::string format_sig9(double v);

// Top-level envelope shared by every command.
nlohmann::json envelope(const std::string& command, const std::string& digest);

}  // namespace kscluster::report
