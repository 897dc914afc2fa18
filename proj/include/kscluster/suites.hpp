#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kscluster/graphkit.hpp"
#include "kscluster/random.hpp"

namespace kscluster::suites {

struct SuiteOptions {
  std::uint64_t seed = 1;
  int trials = 200;
  // Fixed configurations supplied by the user; suites that accept them run these too.
  std::vector<graphkit::PointConfig> points;
};

struct SuiteResult {
  std::string name;
  bool ok = true;
  std::uint64_t checks = 0;
  nlohmann::json stats = nlohmann::json::object();
  std::optional<nlohmann::json> counterexample;
};

const std::vector<std::string>& suite_names();  // excludes the "all" alias
bool is_suite(const std::string& name);

// Throws ContractError for an unknown suite or violated precondition.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opts);

// Random hard-core Mayer matrix with edge density drawn per call.
graphkit::PointConfig random_hard_core(Rng& rng, int n);
// Random exact rationals in [-1, 0] with denominators up to 8.
graphkit::PointConfig random_rational_mayer(Rng& rng, int n);

}  // namespace kscluster::suites
