#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kscluster/rational.hpp"

namespace kscluster::models {

using Cell = std::vector<int>;
// Sorted, duplicate-free list of lattice cells.
using CellSet = std::vector<Cell>;

CellSet make_cell_set(std::vector<Cell> cells);
CellSet translate(const CellSet& cells, const Cell& offset);
bool intersects(const CellSet& a, const CellSet& b);
CellSet set_union(const CellSet& a, const CellSet& b);
std::string format_cell(const Cell& c);

class AbstractPolymerSystem {
 public:
  // `incompatible` must be symmetric with a true diagonal.
  AbstractPolymerSystem(std::vector<std::string> ids, std::vector<Rational> activities,
                        std::vector<std::vector<bool>> incompatible);
  // Adds the diagonal and mirrors each listed pair.
  static AbstractPolymerSystem from_pairs(std::vector<std::string> ids, std::vector<Rational> activities,
                                          const std::vector<std::pair<int, int>>& pairs);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::string& id(int i) const { return ids_[static_cast<std::size_t>(i)]; }
  int index_of(const std::string& id) const;
  const Rational& activity(int i) const { return activity_[static_cast<std::size_t>(i)]; }
  double activity_value(int i) const { return activity_d_[static_cast<std::size_t>(i)]; }
  bool incompatible(int i, int j) const { return rel_[static_cast<std::size_t>(i * size() + j)]; }
  const std::vector<int>& gamma(int i) const { return gamma_[static_cast<std::size_t>(i)]; }
  AbstractPolymerSystem with_activities(std::vector<Rational> activities) const;

 private:
  std::vector<std::string> ids_;
  std::vector<Rational> activity_;
  std::vector<double> activity_d_;
  std::vector<bool> rel_;
  std::vector<std::vector<int>> gamma_;
  std::map<std::string, int> index_;
};

struct CompatibleSubset {
  std::vector<int> members;  // polymer indices, increasing
  int size;
  int closure_size;  // |Gamma(Y)| within the system
};

struct NeighborhoodSummary {
  int center;
  std::vector<int> gamma;
  std::vector<CompatibleSubset> subsets;

  // Number of compatible subsets of each size: the independence polynomial of Gamma(x).
  std::vector<std::uint64_t> size_counts() const;
  // (size, closure size) -> multiplicity.
  std::map<std::pair<int, int>, std::uint64_t> closure_multiset() const;
};

inline constexpr std::uint64_t kDefaultSubsetCap = 1'000'000;

NeighborhoodSummary neighborhood(const AbstractPolymerSystem& system, const std::string& x,
                                 std::uint64_t cap = kDefaultSubsetCap);
NeighborhoodSummary neighborhood(const AbstractPolymerSystem& system, int x, std::uint64_t cap = kDefaultSubsetCap);

class LatticeShapeModel {
 public:
  LatticeShapeModel(int dimension, std::vector<Cell> shape, double activity = 0.0);

  int dimension() const { return d_; }
  const CellSet& shape() const { return shape_; }
  double activity() const { return z_; }
  int cell_count() const { return static_cast<int>(shape_.size()); }
  // Coordinate-wise extent max - min of the canonical shape.
  std::vector<int> span() const;
  // All translates of the shape that contain `cell`.
  std::vector<CellSet> translates_containing(const Cell& cell) const;
  static LatticeShapeModel cube(int dimension, int side, double activity = 0.0);

 private:
  int d_;
  CellSet shape_;
  double z_;
};

inline constexpr std::size_t kMaxMaterializedTranslates = 200'000;

struct LatticeSystem {
  AbstractPolymerSystem system;
  int center;                   // index of the canonical translate
  std::vector<Cell> offsets;    // translate offset per polymer
};

// Translates of the shape in a box around the origin big enough that Gamma(x)
// and Gamma(Y) for Y inside Gamma(x) are complete for the canonical translate x.
LatticeSystem lattice_neighborhood_system(const LatticeShapeModel& model);

std::uint64_t v_count(const LatticeShapeModel& model, const CellSet& domain);

struct SubadditivityResult {
  bool ok;
  int trials;
  std::optional<std::pair<CellSet, CellSet>> counterexample;
};
SubadditivityResult strong_subadditivity_check(const LatticeShapeModel& model, int trials, std::uint64_t seed);

enum class RodFlavor { discrete, continuous };

class RodSystem {
 public:
  // `min_length` defaults to the smallest length; it must be positive for continuous rods.
  RodSystem(RodFlavor flavor, std::vector<double> lengths, std::vector<double> weights,
            std::optional<double> min_length = std::nullopt);

  RodFlavor flavor() const { return flavor_; }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<double>& weights() const { return weights_; }
  double min_length() const { return delta_; }

 private:
  RodFlavor flavor_;
  std::vector<double> lengths_;
  std::vector<double> weights_;
  double delta_;
};

class BallSystem {
 public:
  BallSystem(int dimension, std::vector<double> radii, std::vector<double> weights);

  int dimension() const { return d_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int d_;
  std::vector<double> radii_;
  std::vector<double> weights_;
};

double ball_volume(int d, double r);
double log_ball_volume(int d, double r);

struct Interval {
  double lo;
  double hi;
};
// Length of the union of [lo - r, hi + r] over the given intervals.
double vr_intervals(const std::vector<Interval>& domain, double r);

}  // namespace kscluster::models
