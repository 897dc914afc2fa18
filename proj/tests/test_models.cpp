#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kscluster/errors.hpp"
#include "kscluster/models.hpp"
#include "kscluster/random.hpp"

using namespace kscluster;
using namespace kscluster::models;

namespace {

LatticeShapeModel dimer() { return LatticeShapeModel(1, {{0}, {1}}); }

}  // namespace

TEST_CASE("abstract system validation") {
  CHECK_THROWS_AS(AbstractPolymerSystem({"a", "a"}, {1, 1}, {{true, false}, {false, true}}), ContractError);
  CHECK_THROWS_AS(AbstractPolymerSystem({"a", "b"}, {1, 1}, {{true, true}, {false, true}}), ContractError);
  CHECK_THROWS_AS(AbstractPolymerSystem({"a"}, {1}, {{false}}), ContractError);
  CHECK_THROWS_AS(AbstractPolymerSystem({"a"}, {-1}, {{true}}), ContractError);
  CHECK_THROWS_AS(AbstractPolymerSystem({}, {}, {}), ContractError);
  auto s = AbstractPolymerSystem::from_pairs({"a", "b", "c"}, {1, 2, 3}, {{0, 1}});
  CHECK(s.incompatible(0, 0));
  CHECK(s.incompatible(1, 0));
  CHECK(!s.incompatible(0, 2));
  CHECK(s.gamma(0) == std::vector<int>{0, 1});
  CHECK(s.index_of("c") == 2);
  CHECK_THROWS_AS(s.index_of("zz"), ContractError);
}

TEST_CASE("neighborhood of a dimer on Z") {
  auto lat = lattice_neighborhood_system(dimer());
  auto nb = neighborhood(lat.system, lat.center);
  CHECK(nb.gamma.size() == 3);
  auto counts = nb.size_counts();
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 3);
  CHECK(counts[2] == 1);
  CHECK(lat.system.size() >= 7);
}

TEST_CASE("neighborhood of a 2x2 cube reproduces the displayed polynomials") {
  auto lat = lattice_neighborhood_system(LatticeShapeModel::cube(2, 2));
  auto nb = neighborhood(lat.system, lat.center);
  CHECK(nb.gamma.size() == 9);
  CHECK(nb.size_counts() == std::vector<std::uint64_t>{1, 9, 16, 8, 1});
  std::map<std::pair<int, int>, std::uint64_t> expected{{{0, 0}, 1}, {{1, 9}, 9},  {{2, 15}, 6}, {{2, 16}, 8},
                                                        {{2, 17}, 2}, {{3, 21}, 8}, {{4, 25}, 1}};
  CHECK(nb.closure_multiset() == expected);
}

TEST_CASE("monomer and isolated polymers") {
  auto lat = lattice_neighborhood_system(LatticeShapeModel(2, {{0, 0}}));
  auto nb = neighborhood(lat.system, lat.center);
  CHECK(nb.gamma == std::vector<int>{lat.center});
  auto iso = AbstractPolymerSystem::from_pairs({"x"}, {1}, {});
  auto n2 = neighborhood(iso, "x");
  CHECK(n2.gamma == std::vector<int>{0});
  // The empty set and {x}; a singleton is trivially pairwise compatible.
  CHECK(n2.size_counts() == std::vector<std::uint64_t>{1, 1});
  CHECK_THROWS_AS(neighborhood(iso, "y"), ContractError);
}

TEST_CASE("neighborhood cap") {
  auto lat = lattice_neighborhood_system(LatticeShapeModel::cube(2, 2));
  CHECK_THROWS_AS(neighborhood(lat.system, lat.center, 10), CapacityError);
}

TEST_CASE("canonical translate") {
  LatticeShapeModel m(2, {{3, 4}, {3, 5}});
  CHECK(m.shape() == make_cell_set({{0, 0}, {0, 1}}));
  CHECK_THROWS_AS(LatticeShapeModel(2, {}), ContractError);
  CHECK_THROWS_AS(LatticeShapeModel(2, {{0}}), ContractError);
}

TEST_CASE("v_count") {
  auto cube = LatticeShapeModel::cube(2, 2);
  CHECK(v_count(cube, {}) == 0);
  CHECK(v_count(cube, {{0, 0}}) == 4);
  CHECK(v_count(cube, cube.shape()) == 9);
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 3; ++k) {
      auto c = LatticeShapeModel::cube(d, k);
      CHECK(v_count(c, c.shape()) == static_cast<std::uint64_t>(std::pow(2 * k - 1, d)));
    }
  // Far-apart pieces add: two single cells give 2 + 2, two dimer footprints give 3 + 3.
  CHECK(v_count(dimer(), make_cell_set({{0}, {10}})) == 4);
  CHECK(v_count(dimer(), make_cell_set({{0}, {1}, {10}, {11}})) == 6);
}

TEST_CASE("v_count is monotone and subadditive over cells") {
  Rng rng(99);
  auto m = LatticeShapeModel(2, {{0, 0}, {1, 0}, {0, 1}});
  for (int t = 0; t < 200; ++t) {
    std::vector<Cell> cells;
    int size = rng.range(1, 6);
    for (int i = 0; i < size; ++i) cells.push_back({rng.range(0, 4), rng.range(0, 4)});
    CellSet big = make_cell_set(cells);
    CellSet small(big.begin(), big.begin() + static_cast<long>(big.size() / 2));
    CHECK(v_count(m, small) <= v_count(m, big));
    CHECK(v_count(m, big) <= big.size() * 3);
  }
}

TEST_CASE("strong subadditivity") {
  CHECK(strong_subadditivity_check(dimer(), 1000, 1).ok);
  CHECK(strong_subadditivity_check(LatticeShapeModel::cube(2, 2), 300, 2).ok);
  auto m = LatticeShapeModel(2, {{0, 0}, {1, 1}});
  CHECK(strong_subadditivity_check(m, 300, 3).ok);
  CellSet b = make_cell_set({{0}, {1}});
  CHECK(v_count(dimer(), b) + v_count(dimer(), b) == 2 * v_count(dimer(), b));
}

TEST_CASE("rod and ball validation") {
  CHECK_THROWS_AS(RodSystem(RodFlavor::discrete, {2, 1}, {1, 1}), ContractError);
  CHECK_THROWS_AS(RodSystem(RodFlavor::discrete, {1.5}, {1}), ContractError);
  CHECK_THROWS_AS(RodSystem(RodFlavor::continuous, {1}, {1}, 0.0), ContractError);
  CHECK_THROWS_AS(RodSystem(RodFlavor::continuous, {1}, {-1}), ContractError);
  CHECK_THROWS_AS(RodSystem(RodFlavor::continuous, {1}, {1, 2}), ContractError);
  CHECK_NOTHROW(RodSystem(RodFlavor::continuous, {0.5, 2}, {1, 1}, 0.5));
  CHECK_THROWS_AS(BallSystem(0, {1}, {1}), ContractError);
  CHECK_THROWS_AS(BallSystem(2, {2, 1}, {1, 1}), ContractError);
  CHECK_THROWS_AS(BallSystem(2, {}, {}), ContractError);
}

TEST_CASE("ball volumes") {
  CHECK(ball_volume(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ball_volume(2, 1) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(ball_volume(3, 2) == doctest::Approx(32.0 * M_PI / 3.0).epsilon(1e-13));
  CHECK(ball_volume(4, 1) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-13));
  CHECK(std::exp(log_ball_volume(5, 1.5)) == doctest::Approx(ball_volume(5, 1.5)).epsilon(1e-13));
}

TEST_CASE("dilated interval length") {
  CHECK(vr_intervals({{0, 1}}, 0.5) == doctest::Approx(2.0));
  CHECK(vr_intervals({{0, 1}, {3, 4}}, 0.5) == doctest::Approx(4.0));
  // [-0.5, 1.5] and [1, 2.5] merge into [-0.5, 2.5].
  CHECK(vr_intervals({{0, 1}, {1.5, 2}}, 0.5) == doctest::Approx(3.0));
  CHECK(vr_intervals({{0, 1}, {1.5, 2}}, 0.2) == doctest::Approx(2.3));
  CHECK_THROWS_AS(vr_intervals({{1, 0}}, 0.5), ContractError);
}

TEST_CASE("dilation ratio is non-increasing in r on the line") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<Interval> d1;
    double pos = 0;
    int m = rng.range(1, 4);
    for (int i = 0; i < m; ++i) {
      pos += 3 * rng.unit();
      double len = 0.1 + 2 * rng.unit();
      d1.push_back({pos, pos + len});
      pos += len;
    }
    double a = 10 * rng.unit() - 2;
    Interval d2{a, a + 0.1 + 2 * rng.unit()};
    std::vector<Interval> both = d1;
    both.push_back(d2);
    double prev = INFINITY;
    for (int s = 1; s <= 50; ++s) {
      double r = 0.1 * s;
      double ratio = (vr_intervals(both, r) - vr_intervals(d1, r)) / vr_intervals({d2}, r);
      CHECK(ratio <= prev + 1e-12);
      prev = ratio;
    }
  }
}
