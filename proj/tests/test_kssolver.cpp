#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kscluster/criteria.hpp"
#include "kscluster/errors.hpp"
#include "kscluster/kssolver.hpp"
#include "kscluster/random.hpp"

using namespace kscluster;
using namespace kscluster::kssolver;
using models::Cell;
using models::CellSet;
using models::make_cell_set;

namespace {

CellSet cells1d(std::initializer_list<int> xs) {
  std::vector<Cell> v;
  for (int x : xs) v.push_back({x});
  return make_cell_set(v);
}

std::vector<CellSet> window_subsets(int width) {
  std::vector<CellSet> out;
  for (int mask = 0; mask < (1 << width); ++mask) {
    std::vector<Cell> v;
    for (int i = 0; i < width; ++i)
      if ((mask >> i) & 1) v.push_back({i});
    out.push_back(make_cell_set(v));
  }
  return out;
}

}  // namespace

TEST_CASE("domain canonical form") {
  auto m = DomainMask::from_cells(2, {{3, 1}, {2, 5}});
  CHECK(m.cells.front() == Cell{0, 0});
  CHECK(m.anchor == Cell{2, 5});
  CHECK(m.absolute() == make_cell_set({{3, 1}, {2, 5}}));
  CHECK(DomainMask::from_cells(1, {}).cells.empty());
}

TEST_CASE("family helpers") {
  auto f = SubsetFamily::intervals({2, 4});
  CHECK(f.max_size() == 4);
  CHECK(f.size_period() == 2);
  CHECK(f.translates_containing(0, {5}).size() == 2);
  auto rods = SubsetFamily::from_rods(models::RodSystem(models::RodFlavor::discrete, {1, 3}, {1, 0}));
  CHECK(rods.size_period() == 1);
  CHECK(rods.max_size() == 1);
  CHECK_THROWS_AS(SubsetFamily::from_rods(models::RodSystem(models::RodFlavor::continuous, {1}, {1})), ContractError);
}

TEST_CASE("T~ base cases and dimers") {
  auto dim = SubsetFamily::intervals({2});
  Rational z(1, 10);
  CHECK(tn_recursive(dim, {}, 5, z) == 1);
  CHECK(tn_recursive(dim, cells1d({0}), 1, z) == 1);
  CHECK(tn_recursive(dim, cells1d({0, 1}), 1, z) == 0);
  CHECK(tn_recursive(dim, cells1d({0}), 2, z) == 1);
  CHECK(tn_recursive(dim, cells1d({0}), 3, z) == 1 + 2 * z);
  CHECK(tn_direct(dim, cells1d({0}), 3, z) == 1 + 2 * z);
  CHECK(tn_direct(dim, cells1d({0}), 1, z) == 1);
  CHECK(tn_direct(dim, {}, 4, z) == 1);
  CHECK(tn_direct(dim, cells1d({0, 1}), 4, z) == tn_recursive(dim, cells1d({0, 1}), 4, z));
  CHECK_THROWS_AS(tn_recursive(dim, cells1d({0}), 0, z), ContractError);
  CHECK_THROWS_AS(tn_direct(dim, cells1d({0}), kMaxDirectOrder + 1, z), CapacityError);
}

TEST_CASE("T~ recursion equals the direct cluster sum") {
  for (int len : {2, 3}) {
    auto fam = SubsetFamily::intervals({len});
    for (Rational z : {Rational(1, 10), Rational(1, 4), Rational(1)}) {
      TnTable<Rational> table(fam, z);
      for (const auto& d : window_subsets(5))
        for (int N = 1; N <= 6; ++N) CHECK(table.value(d, N) == tn_direct(fam, d, N, z));
    }
  }
}

TEST_CASE("T~ is monotone in N, at least one when it fits, and rule independent") {
  auto fam = SubsetFamily::intervals({2, 3});
  Rational z(1, 4);
  TnTable<Rational> left(fam, z, CellRule::leftmost), right(fam, z, CellRule::rightmost);
  for (const auto& d : window_subsets(6)) {
    Rational prev = 0;
    for (int N = 1; N <= 9; ++N) {
      Rational v = left.value(d, N);
      CHECK(v == right.value(d, N));
      CHECK(v >= prev);
      if (static_cast<int>(d.size()) <= N) CHECK(v >= 1);
      prev = v;
    }
  }
}

TEST_CASE("T~ on a two-dimensional shape") {
  auto fam = SubsetFamily::from_lattice(models::LatticeShapeModel(2, {{0, 0}, {1, 0}}));
  Rational z(1, 3);
  TnTable<Rational> l(fam, z, CellRule::leftmost), r(fam, z, CellRule::rightmost);
  std::vector<CellSet> doms{make_cell_set({{0, 0}}), make_cell_set({{0, 0}, {1, 1}}), make_cell_set({{0, 0}, {0, 1}})};
  for (const auto& d : doms)
    for (int N = 1; N <= 5; ++N) {
      CHECK(l.value(d, N) == r.value(d, N));
      CHECK(l.value(d, N) == tn_direct(fam, d, N, z));
    }
  // Horizontal dimers only: a single cell is covered by 2 translates.
  CHECK(l.value(doms[0], 3) == 1 + 2 * z);
}

TEST_CASE("T~ memo cap raises a capacity error") {
  TnTable<Rational> t(SubsetFamily::intervals({2}), Rational(1, 4), CellRule::leftmost, 5);
  CHECK_THROWS_AS(t.value(cells1d({0}), 12), CapacityError);
}

TEST_CASE("translation invariance shares memo entries") {
  TnTable<Rational> t(SubsetFamily::intervals({2}), Rational(1, 4));
  Rational a = t.value(cells1d({0, 2}), 6);
  auto n = t.entries();
  CHECK(t.value(cells1d({10, 12}), 6) == a);
  CHECK(t.entries() == n);
}

TEST_CASE("stabilization probe") {
  auto dim = SubsetFamily::intervals({2});
  auto low = stabilization_probe(dim, cells1d({0}), 0.05);
  CHECK(low.outcome == StabilizationResult::Outcome::stabilized);
  CHECK(low.relative_change < 1e-8);
  auto high = stabilization_probe(dim, cells1d({0}), 0.3);
  CHECK(high.outcome != StabilizationResult::Outcome::stabilized);
  auto huge = stabilization_probe(dim, cells1d({0}), 50.0, 1e-8, 64, 10.0);
  CHECK(huge.outcome == StabilizationResult::Outcome::diverged);
}

TEST_CASE("stabilized values satisfy the log-bound equality") {
  // With a = log T~ the single-cell recursion holds with equality at the fixed point.
  auto dim = SubsetFamily::intervals({2});
  double z = 0.05;
  TnTable<double> t(dim, z);
  int N = 60;
  auto T = [&](const CellSet& d) { return t.value(d, N); };
  for (const auto& d : window_subsets(4)) {
    if (d.empty()) continue;
    Cell x = d.front();
    CellSet rest(d.begin() + 1, d.end());
    double rhs = T(rest);
    for (const auto& y : dim.translates_containing(0, x))
      if (!models::intersects(y, rest)) rhs += z * T(models::set_union(rest, y));
    CHECK(std::abs(T(d) - rhs) <= 1e-8 * T(d));
  }
}

TEST_CASE("bfp with the additive ansatz on dimers") {
  auto dim = SubsetFamily::intervals({2});
  Window w{{0}, {5}};
  auto ok = bfp_condition_check(dim, additive_ansatz(std::log(2.0)), w, 5, 0.12);
  CHECK(ok.holds);
  CHECK(ok.domains_checked > 0);
  for (int i = 1; i <= 60; ++i) {
    auto bad = bfp_condition_check(dim, additive_ansatz(0.05 * i), w, 5, 0.2);
    CHECK(!bad.holds);
    REQUIRE(bad.failing_domain);
    CHECK(bad.attempts.size() == bad.failing_domain->size());
  }
}

TEST_CASE("bfp single cell reduces to the empty-rest inequality") {
  auto dim = SubsetFamily::intervals({2});
  double alpha = 0.7, z = 0.1;
  auto v = bfp_condition_check(dim, additive_ansatz(alpha), Window{{0}, {0}}, 1, z);
  double lhs = 2 * z * std::exp(2 * alpha);
  CHECK(v.holds == (lhs <= std::expm1(alpha)));
  auto fail = bfp_condition_check(dim, additive_ansatz(alpha), Window{{0}, {0}}, 1, 0.5);
  CHECK(!fail.holds);
  REQUIRE(fail.attempts.size() == 1);
  CHECK(fail.attempts[0].lhs == doctest::Approx(2 * 0.5 * std::exp(2 * alpha)));
  CHECK(fail.attempts[0].rhs == doctest::Approx(std::expm1(alpha)));
}

TEST_CASE("bfp with the V ansatz") {
  auto model = models::LatticeShapeModel(1, {{0}, {1}});
  auto fam = SubsetFamily::from_lattice(model);
  double z = 0.9 * criteria::lgoof_bound(model).z_max;
  double alpha = criteria::lgoof_bound(model).optimal_param;
  CHECK(bfp_condition_check(fam, v_ansatz(model, alpha), Window{{0}, {5}}, 4, z).holds);
}

TEST_CASE("Kirkwood-Salsburg condition on finite systems") {
  auto lat = models::lattice_neighborhood_system(models::LatticeShapeModel(1, {{0}, {1}}));
  std::size_t n = static_cast<std::size_t>(lat.system.size());
  auto scaled = [&](double z) {
    return lat.system.with_activities(std::vector<Rational>(n, Rational(z)));
  };
  double zfp = criteria::fp_bound(models::LatticeShapeModel(1, {{0}, {1}})).z_max;
  auto below = ks_condition1_check(scaled(zfp * (1 - 1e-6)), XiAnsatz::fp(std::vector<double>(n, 1.0)), 2);
  CHECK(below.holds);
  for (int i = 1; i <= 40; ++i) {
    auto above = ks_condition1_check(scaled(zfp * 1.05), XiAnsatz::fp(std::vector<double>(n, 0.1 * i)), 2);
    CHECK(!above.holds);
  }
  auto iso = models::AbstractPolymerSystem::from_pairs({"x"}, {Rational(1, 2)}, {});
  // A lone polymer needs xi >= z / (1 - z).
  CHECK(ks_condition1_check(iso, XiAnsatz::from_table({{{0}, 1.0}}), 1).holds);
  CHECK(!ks_condition1_check(iso, XiAnsatz::from_table({{{0}, 0.99}}), 1).holds);
  CHECK_THROWS_AS(ks_condition1_check(iso, XiAnsatz::fp({1, 2}), 1), ContractError);
}

TEST_CASE("new-product ansatz is feasible below the new bound") {
  auto model = models::LatticeShapeModel(1, {{0}, {1}});
  auto lat = models::lattice_neighborhood_system(model);
  auto rep = criteria::new_bound(model);
  std::size_t n = static_cast<std::size_t>(lat.system.size());
  auto sys = lat.system.with_activities(std::vector<Rational>(n, Rational(rep.z_max * (1 - 1e-6))));
  auto v = ks_condition1_check(sys, XiAnsatz::fresh(std::vector<double>(n, rep.optimal_param)), 1);
  CHECK(v.holds);
}

TEST_CASE("necessary decay") {
  auto dim = SubsetFamily::intervals({2});
  double z = 0.1;
  CHECK(necessary_decay(dim, z, {0}) == doctest::Approx(2 * z * std::exp(3 * z)));
  auto cube = SubsetFamily::from_lattice(models::LatticeShapeModel::cube(2, 2));
  CHECK(necessary_decay(cube, z, {0, 0}) == doctest::Approx(4 * z * std::exp(9 * z)));
  CHECK(necessary_decay(dim, 0.0, {0}) == 0.0);
}

TEST_CASE("beta coefficients") {
  QGraph one{1, {0u}, {1.0}};
  CHECK(beta_coefficient(one, 1u) == 1.0);
  CHECK(beta_coefficient(one, 0u) == doctest::Approx(std::exp(-1.0) + 1.0));
  Rng rng(2024);
  double lowest = INFINITY;
  for (int t = 0; t < 1000; ++t) {
    QGraph q;
    q.size = rng.range(1, 8);
    q.adjacency.assign(static_cast<std::size_t>(q.size), 0u);
    for (int i = 0; i < q.size; ++i) {
      q.mu.push_back(3 * rng.unit());
      for (int j = i + 1; j < q.size; ++j)
        if (rng.coin()) {
          q.adjacency[static_cast<std::size_t>(i)] |= 1u << j;
          q.adjacency[static_cast<std::size_t>(j)] |= 1u << i;
        }
    }
    std::uint32_t all = (1u << q.size) - 1u;
    CHECK(beta_coefficient(q, all) == doctest::Approx(1.0).epsilon(1e-15));
    lowest = std::min(lowest, beta_coefficient(q, static_cast<std::uint32_t>(rng.below(all + 1ull))));
  }
  CHECK(lowest >= 1 - 1e-12);
  QGraph asym{2, {2u, 0u}, {1, 1}};
  CHECK_THROWS_AS(beta_coefficient(asym, 0), ContractError);
  QGraph big;
  big.size = kMaxQGraphSize + 1;
  CHECK_THROWS_AS(beta_coefficient(big, 0), CapacityError);
}

TEST_CASE("Ursell recursions on subset polymers") {
  CHECK(ursell_of_sets({cells1d({0})}) == 1);
  CHECK(ursell_of_sets({cells1d({0}), cells1d({0, 1})}) == -1);
  CHECK(ursell_of_sets({cells1d({0}), cells1d({5, 6})}) == 0);
  auto a = check_phirecurr(cells1d({2}), {0}, {cells1d({0, 1}), cells1d({1, 2})});
  CHECK(a.equal);
  Rng rng(8);
  for (int t = 0; t < 300; ++t) {
    int x = rng.range(0, 6);
    std::vector<Cell> rest;
    for (int c = 0; c < 7; ++c)
      if (c != x && rng.coin(0.3)) rest.push_back({c});
    std::vector<CellSet> ys;
    int k = rng.range(1, 3);
    for (int i = 0; i < k; ++i) {
      int s = rng.coin() ? x - rng.range(0, 1) : rng.range(-1, 6);
      ys.push_back(cells1d({s, s + 1}));
    }
    auto r = check_phirecurr(make_cell_set(rest), {x}, ys);
    CHECK(r.equal);
    CellSet d0 = cells1d({x, x + 1});
    std::vector<Cell> d1;
    for (int c = 0; c < 9; ++c)
      if ((c < x || c > x + 1) && rng.coin(0.25)) d1.push_back({c});
    auto p = check_prec(d0, make_cell_set(d1), ys);
    CHECK(p.equal);
  }
  CHECK_THROWS_AS(check_phirecurr(cells1d({0}), {0}, {cells1d({0, 1})}), ContractError);
  CHECK_THROWS_AS(check_prec(cells1d({0}), cells1d({0}), {cells1d({0, 1})}), ContractError);
}
