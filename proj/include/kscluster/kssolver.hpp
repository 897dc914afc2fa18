#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kscluster/models.hpp"
#include "kscluster/rational.hpp"

namespace kscluster::kssolver {

using models::Cell;
using models::CellSet;

struct DomainMask {
  int dimension = 1;
  CellSet cells;  // translated so the lexicographically smallest cell is the origin
  Cell anchor;    // offset that restores the original position

  static DomainMask from_cells(int dimension, std::vector<Cell> cells);
  CellSet absolute() const;
};

// Every translate of each shape is a polymer with activity z * weight.
struct SubsetFamily {
  int dimension = 1;
  std::vector<CellSet> shapes;
  std::vector<Rational> weights;

  static SubsetFamily from_lattice(const models::LatticeShapeModel& model);
  static SubsetFamily from_rods(const models::RodSystem& rods);  // discrete rods only
  // Shapes given as integer-length intervals on Z with unit weight.
  static SubsetFamily intervals(const std::vector<int>& lengths);

  std::size_t max_size() const;
  // gcd of the sizes of shapes with positive weight.
  int size_period() const;
  // Polymers of shape `s` containing `cell`.
  std::vector<CellSet> translates_containing(std::size_t s, const Cell& cell) const;
};

enum class CellRule { leftmost, rightmost };

inline constexpr std::size_t kDefaultMemoCap = 4'000'000;

// Memoized partial sums T~_N(D) driven by the single-cell recursion.
template <typename Number>
class TnTable {
 public:
  TnTable(SubsetFamily family, Number z, CellRule rule = CellRule::leftmost, std::size_t cap = kDefaultMemoCap);

  Number value(const CellSet& domain, int N);
  std::size_t entries() const { return memo_.size(); }
  const SubsetFamily& family() const { return family_; }

 private:
  Number compute(const CellSet& canonical, int N);

  SubsetFamily family_;
  std::vector<Number> activity_;
  CellRule rule_;
  std::size_t cap_;
  std::map<std::pair<CellSet, int>, Number> memo_;
};

extern template class TnTable<Rational>;
extern template class TnTable<double>;

Rational tn_recursive(const SubsetFamily& family, const CellSet& domain, int N, const Rational& z,
                      CellRule rule = CellRule::leftmost);

inline constexpr int kMaxDirectOrder = 8;
Rational tn_direct(const SubsetFamily& family, const CellSet& domain, int N, const Rational& z);

struct StabilizationResult {
  enum class Outcome { stabilized, diverged, ceiling };
  Outcome outcome;
  int order;              // N at which the outcome was decided
  int period;             // comparison step between orders
  double value;           // T~ at `order`
  double relative_change; // last relative change observed
};

// Compares T~_N(D) with T~_{N - period} until the relative change drops below `tol`
// (stabilized), the ratio exceeds `divergence_ratio`, or N reaches `ceiling`.
StabilizationResult stabilization_probe(const SubsetFamily& family, const CellSet& domain, double z,
                                        double tol = 1e-8, int ceiling = 64, double divergence_ratio = 1e6);

using SetFunction = std::function<double(const CellSet&)>;
SetFunction additive_ansatz(double alpha);
SetFunction v_ansatz(const models::LatticeShapeModel& model, double alpha);

struct Attempt {
  Cell x;
  double lhs;
  double rhs;
};

struct BfpVerdict {
  bool holds;
  std::uint64_t domains_checked;
  std::optional<CellSet> failing_domain;
  std::vector<Attempt> attempts;  // every x tried on the failing domain
};

struct Window {
  Cell lo;
  Cell hi;  // inclusive
};

BfpVerdict bfp_condition_check(const SubsetFamily& family, const SetFunction& a, const Window& window, int size_cap,
                               double z, std::uint64_t domain_cap = 2'000'000);

// Candidate families for the Kirkwood-Salsburg condition on a finite abstract system.
struct XiAnsatz {
  enum class Kind { fp_product, new_product, table };
  Kind kind = Kind::fp_product;
  std::vector<double> mu;                    // per polymer, product kinds
  std::map<std::vector<int>, double> table;  // sorted polymer tuple -> value

  static XiAnsatz fp(std::vector<double> mu) { return {Kind::fp_product, std::move(mu), {}}; }
  static XiAnsatz fresh(std::vector<double> mu) { return {Kind::new_product, std::move(mu), {}}; }
  static XiAnsatz from_table(std::map<std::vector<int>, double> t) { return {Kind::table, {}, std::move(t)}; }
};

struct Condition1Verdict {
  bool holds;
  std::uint64_t tuples_checked;
  std::vector<int> failing_tuple;
  double lhs;
  double rhs;
};

// z(x1) delta_{n,1} + (K~ xi)_n <= xi_n for every tuple of length <= n_max; activities in double precision.
Condition1Verdict ks_condition1_check(const models::AbstractPolymerSystem& system, const XiAnsatz& ansatz, int n_max,
                                      std::uint64_t tuple_cap = 10'000'000);

// Sum over polymers Y containing x of z(Y) exp(V(Y)) with V(D) the total activity of polymers meeting D.
double necessary_decay(const SubsetFamily& family, double z, const Cell& x);

struct QGraph {
  int size = 0;
  std::vector<std::uint32_t> adjacency;  // irreflexive
  std::vector<double> mu;

  std::uint32_t closed_neighborhood(int q) const { return adjacency[static_cast<std::size_t>(q)] | (1u << q); }
};

inline constexpr int kMaxQGraphSize = 16;
double beta_coefficient(const QGraph& q, std::uint32_t excluded);

// Exact checks of the subset-polymer Ursell recursions on concrete sets.
struct IntIdentity {
  bool equal;
  std::int64_t lhs;
  std::int64_t rhs;
};
std::int64_t ursell_of_sets(const std::vector<CellSet>& sets);
IntIdentity check_phirecurr(const CellSet& rest, const Cell& x, const std::vector<CellSet>& ys);
IntIdentity check_prec(const CellSet& d0, const CellSet& d1, const std::vector<CellSet>& ys);

}  // namespace kscluster::kssolver
