#include "kscluster/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <set>

#include "kscluster/errors.hpp"
#include "kscluster/random.hpp"

namespace kscluster::models {

CellSet make_cell_set(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

CellSet translate(const CellSet& cells, const Cell& offset) {
  CellSet out = cells;
  for (auto& c : out)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += offset[i];
  return out;  // translation preserves lexicographic order
}

bool intersects(const CellSet& a, const CellSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

CellSet set_union(const CellSet& a, const CellSet& b) {
  CellSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string format_cell(const Cell& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

AbstractPolymerSystem::AbstractPolymerSystem(std::vector<std::string> ids, std::vector<Rational> activities,
                                             std::vector<std::vector<bool>> incompatible)
    : ids_(std::move(ids)), activity_(std::move(activities)) {
  std::size_t n = ids_.size();
  if (n == 0) throw ContractError("polymer system is empty");
  if (activity_.size() != n) throw ContractError("activity list length differs from polymer count");
  if (incompatible.size() != n) throw ContractError("incompatibility matrix has wrong size");
  rel_.assign(n * n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (activity_[i] < 0) throw ContractError("activity of '" + ids_[i] + "' is negative");
    if (incompatible[i].size() != n) throw ContractError("incompatibility matrix must be square");
    if (!index_.emplace(ids_[i], static_cast<int>(i)).second) throw ContractError("duplicate polymer id '" + ids_[i] + "'");
    for (std::size_t j = 0; j < n; ++j) rel_[i * n + j] = incompatible[i][j];
  }
  gamma_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rel_[i * n + i]) throw ContractError("incompatibility must be reflexive; '" + ids_[i] + "' is not");
    for (std::size_t j = 0; j < n; ++j) {
      if (rel_[i * n + j] != rel_[j * n + i])
        throw ContractError("incompatibility not symmetric for '" + ids_[i] + "', '" + ids_[j] + "'");
      if (rel_[i * n + j]) gamma_[i].push_back(static_cast<int>(j));
    }
    activity_d_.push_back(activity_[i].get_d());
  }
}

AbstractPolymerSystem AbstractPolymerSystem::from_pairs(std::vector<std::string> ids, std::vector<Rational> activities,
                                                        const std::vector<std::pair<int, int>>& pairs) {
  std::size_t n = ids.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) rel[i][i] = true;
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw ContractError("incompatibility pair refers to an unknown polymer");
    rel[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
    rel[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
  }
  return AbstractPolymerSystem(std::move(ids), std::move(activities), std::move(rel));
}

int AbstractPolymerSystem::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ContractError("unknown polymer id '" + id + "'");
  return it->second;
}

AbstractPolymerSystem AbstractPolymerSystem::with_activities(std::vector<Rational> activities) const {
  std::size_t n = ids_.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rel[i][j] = rel_[i * n + j];
  return AbstractPolymerSystem(ids_, std::move(activities), std::move(rel));
}

std::vector<std::uint64_t> NeighborhoodSummary::size_counts() const {
  std::vector<std::uint64_t> counts;
  for (const auto& s : subsets) {
    if (static_cast<std::size_t>(s.size) >= counts.size()) counts.resize(static_cast<std::size_t>(s.size) + 1, 0);
    ++counts[static_cast<std::size_t>(s.size)];
  }
  return counts;
}

std::map<std::pair<int, int>, std::uint64_t> NeighborhoodSummary::closure_multiset() const {
  std::map<std::pair<int, int>, std::uint64_t> m;
  for (const auto& s : subsets) ++m[{s.size, s.closure_size}];
  return m;
}

NeighborhoodSummary neighborhood(const AbstractPolymerSystem& system, const std::string& x, std::uint64_t cap) {
  return neighborhood(system, system.index_of(x), cap);
}

NeighborhoodSummary neighborhood(const AbstractPolymerSystem& system, int x, std::uint64_t cap) {
  if (x < 0 || x >= system.size()) throw ContractError("polymer index out of range");
  NeighborhoodSummary out{x, system.gamma(x), {}};
  const auto& gamma = out.gamma;
  std::size_t words = (static_cast<std::size_t>(system.size()) + 63) / 64;
  auto closure_of = [&](int y) {
    std::vector<std::uint64_t> bits(words, 0);
    for (int w : system.gamma(y)) bits[static_cast<std::size_t>(w) / 64] |= std::uint64_t{1} << (w % 64);
    return bits;
  };
  std::vector<std::vector<std::uint64_t>> closures;
  for (int y : gamma) closures.push_back(closure_of(y));

  std::vector<int> chosen;
  std::vector<std::vector<std::uint64_t>> stack{std::vector<std::uint64_t>(words, 0)};
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (out.subsets.size() >= cap) throw CapacityError("compatible subset enumeration", static_cast<long long>(cap),
                                                       static_cast<long long>(out.subsets.size()) + 1);
    int closure = 0;
    for (auto w : stack.back()) closure += std::popcount(w);
    out.subsets.push_back({chosen, static_cast<int>(chosen.size()), closure});
    for (std::size_t t = start; t < gamma.size(); ++t) {
      int y = gamma[t];
      bool ok = true;
      for (int c : chosen)
        if (system.incompatible(c, y)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      chosen.push_back(y);
      auto next = stack.back();
      for (std::size_t w = 0; w < words; ++w) next[w] |= closures[t][w];
      stack.push_back(std::move(next));
      rec(t + 1);
      stack.pop_back();
      chosen.pop_back();
    }
  };
  rec(0);
  return out;
}

namespace {

CellSet canonical_shape(int d, std::vector<Cell> cells) {
  if (cells.empty()) throw ContractError("shape must contain at least one cell");
  for (const auto& c : cells)
    if (static_cast<int>(c.size()) != d)
      throw ContractError("shape cell " + format_cell(c) + " does not have dimension " + std::to_string(d));
  CellSet s = make_cell_set(std::move(cells));
  Cell anchor = s.front();
  for (auto& c : anchor) c = -c;
  return translate(s, anchor);
}

}  // namespace

LatticeShapeModel::LatticeShapeModel(int dimension, std::vector<Cell> shape, double activity)
    : d_(dimension), z_(activity) {
  if (dimension < 1) throw ContractError("dimension must be positive");
  if (!(activity >= 0) || !std::isfinite(activity)) throw ContractError("activity must be a finite non-negative number");
  shape_ = canonical_shape(dimension, std::move(shape));
}

std::vector<int> LatticeShapeModel::span() const {
  std::vector<int> lo(static_cast<std::size_t>(d_), shape_.front()[0]), hi = lo;
  for (int i = 0; i < d_; ++i) lo[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] = shape_.front()[static_cast<std::size_t>(i)];
  for (const auto& c : shape_)
    for (int i = 0; i < d_; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
    }
  std::vector<int> out(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i) out[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
  return out;
}

std::vector<CellSet> LatticeShapeModel::translates_containing(const Cell& cell) const {
  std::vector<CellSet> out;
  for (const auto& s : shape_) {
    Cell offset(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) offset[static_cast<std::size_t>(i)] = cell[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(i)];
    out.push_back(translate(shape_, offset));
  }
  return out;
}

LatticeShapeModel LatticeShapeModel::cube(int dimension, int side, double activity) {
  if (dimension < 1 || side < 1) throw ContractError("cube needs positive dimension and side");
  std::vector<Cell> cells;
  Cell c(static_cast<std::size_t>(dimension), 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == dimension) {
      cells.push_back(c);
      return;
    }
    for (int v = 0; v < side; ++v) {
      c[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1);
    }
  };
  rec(0);
  return LatticeShapeModel(dimension, std::move(cells), activity);
}

LatticeSystem lattice_neighborhood_system(const LatticeShapeModel& model) {
  int d = model.dimension();
  auto span = model.span();
  // Offsets of Gamma(Gamma(x)) lie in [-2 span, 2 span]; one more layer forms a shell
  // that must be disjoint from Gamma(x).
  std::vector<int> reach(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    reach[static_cast<std::size_t>(i)] = 2 * span[static_cast<std::size_t>(i)] + 1;
    total *= static_cast<std::size_t>(2 * reach[static_cast<std::size_t>(i)] + 1);
    if (total > kMaxMaterializedTranslates)
      throw CapacityError("materialized translates", static_cast<long long>(kMaxMaterializedTranslates),
                          static_cast<long long>(total));
  }
  std::vector<Cell> offsets;
  Cell o(static_cast<std::size_t>(d));
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      offsets.push_back(o);
      return;
    }
    for (int v = -reach[static_cast<std::size_t>(axis)]; v <= reach[static_cast<std::size_t>(axis)]; ++v) {
      o[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1);
    }
  };
  rec(0);
  std::size_t n = offsets.size();
  std::vector<CellSet> polys;
  polys.reserve(n);
  for (const auto& off : offsets) polys.push_back(translate(model.shape(), off));
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (intersects(polys[i], polys[j])) rel[i][j] = rel[j][i] = true;
  int center = -1;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    bool zero = std::all_of(offsets[i].begin(), offsets[i].end(), [](int v) { return v == 0; });
    if (zero) center = static_cast<int>(i);
    ids.push_back("S+" + format_cell(offsets[i]));
  }
  // Shell translates must not touch Gamma(x); otherwise Gamma(Y) could leave the window.
  for (std::size_t i = 0; i < n; ++i) {
    bool shell = false;
    for (int a = 0; a < d; ++a)
      if (std::abs(offsets[i][static_cast<std::size_t>(a)]) == reach[static_cast<std::size_t>(a)]) shell = true;
    if (!shell) continue;
    for (std::size_t g = 0; g < n; ++g)
      if (rel[static_cast<std::size_t>(center)][g] && rel[i][g])
        throw CapacityError("neighborhood window too small for shape", 0, 1);
  }
  Rational z(model.activity());
  AbstractPolymerSystem sys(std::move(ids), std::vector<Rational>(n, z), std::move(rel));
  return {std::move(sys), center, std::move(offsets)};
}

std::uint64_t v_count(const LatticeShapeModel& model, const CellSet& domain) {
  std::set<Cell> offsets;
  for (const auto& x : domain) {
    if (static_cast<int>(x.size()) != model.dimension()) throw ContractError("domain cell has wrong dimension");
    for (const auto& s : model.shape()) {
      Cell o(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) o[i] = x[i] - s[i];
      offsets.insert(std::move(o));
    }
  }
  return offsets.size();
}

namespace {

CellSet random_subset(Rng& rng, int d, int side) {
  int cells = 1;
  for (int i = 0; i < d; ++i) cells *= side;
  double p = 0.15 + 0.6 * rng.unit();
  std::vector<Cell> out;
  for (int idx = 0; idx < cells; ++idx) {
    if (!rng.coin(p)) continue;
    Cell c(static_cast<std::size_t>(d));
    int rem = idx;
    for (int i = 0; i < d; ++i) {
      c[static_cast<std::size_t>(i)] = rem % side;
      rem /= side;
    }
    out.push_back(std::move(c));
  }
  return make_cell_set(std::move(out));
}

}  // namespace

SubadditivityResult strong_subadditivity_check(const LatticeShapeModel& model, int trials, std::uint64_t seed) {
  Rng rng(seed);
  int d = model.dimension();
  int side = 2;
  for (int s : model.span()) side = std::max(side, 2 * s + 4);
  if (d >= 3) side = std::min(side, 6);
  SubadditivityResult res{true, trials, std::nullopt};
  for (int t = 0; t < trials; ++t) {
    CellSet b = random_subset(rng, d, side);
    CellSet c = random_subset(rng, d, side);
    CellSet un = set_union(b, c);
    CellSet in;
    std::set_intersection(b.begin(), b.end(), c.begin(), c.end(), std::back_inserter(in));
    if (v_count(model, b) + v_count(model, c) < v_count(model, un) + v_count(model, in)) {
      res.ok = false;
      res.counterexample = std::make_pair(b, c);
      return res;
    }
  }
  return res;
}

RodSystem::RodSystem(RodFlavor flavor, std::vector<double> lengths, std::vector<double> weights,
                     std::optional<double> min_length)
    : flavor_(flavor), lengths_(std::move(lengths)), weights_(std::move(weights)) {
  if (lengths_.empty()) throw ContractError("rod system needs at least one length");
  if (weights_.size() != lengths_.size()) throw ContractError("rod weights must match lengths");
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (!(lengths_[i] > 0) || !std::isfinite(lengths_[i])) throw ContractError("rod lengths must be positive");
    if (i > 0 && !(lengths_[i] > lengths_[i - 1])) throw ContractError("rod lengths must be strictly increasing");
    if (flavor_ == RodFlavor::discrete && lengths_[i] != std::floor(lengths_[i]))
      throw ContractError("discrete rod lengths must be integers");
    if (!(weights_[i] >= 0) || !std::isfinite(weights_[i])) throw ContractError("rod weights must be non-negative");
  }
  delta_ = min_length.value_or(lengths_.front());
  if (flavor_ == RodFlavor::continuous && !(delta_ > 0)) throw ContractError("continuous rods need min length > 0");
  if (lengths_.front() < delta_) throw ContractError("rod length below the declared minimum length");
}

BallSystem::BallSystem(int dimension, std::vector<double> radii, std::vector<double> weights)
    : d_(dimension), radii_(std::move(radii)), weights_(std::move(weights)) {
  if (d_ < 1) throw ContractError("ball dimension must be positive");
  if (radii_.empty()) throw ContractError("ball system needs at least one radius");
  if (weights_.size() != radii_.size()) throw ContractError("ball weights must match radii");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0) || !std::isfinite(radii_[i])) throw ContractError("radii must be positive");
    if (i > 0 && !(radii_[i] > radii_[i - 1])) throw ContractError("radii must be strictly increasing");
    if (!(weights_[i] >= 0) || !std::isfinite(weights_[i])) throw ContractError("ball weights must be non-negative");
  }
}

double log_ball_volume(int d, double r) {
  if (d < 1 || !(r > 0)) throw ContractError("ball volume needs d >= 1 and r > 0");
  double h = 0.5 * d;
  return h * std::log(M_PI) + d * std::log(r) - std::lgamma(h + 1.0);
}

double ball_volume(int d, double r) {
  if (d == 1) {
    if (!(r > 0)) throw ContractError("ball volume needs d >= 1 and r > 0");
    return 2.0 * r;
  }
  if (d == 2) {
    if (!(r > 0)) throw ContractError("ball volume needs d >= 1 and r > 0");
    return M_PI * r * r;
  }
  return std::exp(log_ball_volume(d, r));
}

double vr_intervals(const std::vector<Interval>& domain, double r) {
  if (!(r > 0)) throw ContractError("dilation radius must be positive");
  std::vector<Interval> iv;
  for (const auto& i : domain) {
    if (!(i.lo <= i.hi) || !std::isfinite(i.lo) || !std::isfinite(i.hi))
      throw ContractError("malformed interval");
    iv.push_back({i.lo - r, i.hi + r});
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0;
  std::size_t i = 0;
  while (i < iv.size()) {
    double lo = iv[i].lo, hi = iv[i].hi;
    std::size_t j = i + 1;
    while (j < iv.size() && iv[j].lo <= hi) hi = std::max(hi, iv[j++].hi);
    total += hi - lo;
    i = j;
  }
  return total;
}

}  // namespace kscluster::models
