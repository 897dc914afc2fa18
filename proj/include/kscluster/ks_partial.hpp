#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kscluster/graphkit.hpp"
#include "kscluster/models.hpp"

namespace kscluster::graphkit {

// Hard-core Mayer matrix of a tuple of polymers (repeated entries overlap).
PointConfig tuple_config(const models::AbstractPolymerSystem& system, const std::vector<int>& tuple);

// Calls visit(multiset, 1 / prod of multiplicity factorials) for every multiset of size
// 1..max_size drawn from `pool` (kept in pool order).
void for_each_multiset(const std::vector<int>& pool, int max_size,
                       const std::function<void(const std::vector<int>&, const Rational&)>& visit);

// Truncated absolute correlation sums S~_{N,n} with exact activities.
class PartialSums {
 public:
  explicit PartialSums(const models::AbstractPolymerSystem& system, std::uint64_t term_cap = 1'000'000);
  Rational value(int N, std::vector<int> roots);
  std::uint64_t terms() const { return terms_; }

 private:
  const models::AbstractPolymerSystem& system_;
  std::uint64_t term_cap_;
  std::uint64_t terms_ = 0;
  std::map<std::pair<int, std::vector<int>>, Rational> memo_;
};

struct KsPartialResult {
  bool holds;
  std::uint64_t checks;
  std::string counterexample;
};

KsPartialResult verify_ks_recursion_partial(const models::AbstractPolymerSystem& system, int n_max, int N_max,
                                            const SelectionRule& rule = SelectionRule::first(),
                                            std::uint64_t term_cap = 1'000'000);

}  // namespace kscluster::graphkit
