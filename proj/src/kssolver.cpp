#include "kscluster/kssolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "kscluster/errors.hpp"
#include "kscluster/graphkit.hpp"

namespace kscluster::kssolver {

using models::intersects;
using models::set_union;
using models::translate;

DomainMask DomainMask::from_cells(int dimension, std::vector<Cell> cells) {
  for (const auto& c : cells)
    if (static_cast<int>(c.size()) != dimension) throw ContractError("domain cell has the wrong dimension");
  DomainMask m;
  m.dimension = dimension;
  CellSet s = models::make_cell_set(std::move(cells));
  m.anchor = s.empty() ? Cell(static_cast<std::size_t>(dimension), 0) : s.front();
  Cell back = m.anchor;
  for (auto& v : back) v = -v;
  m.cells = translate(s, back);
  return m;
}

CellSet DomainMask::absolute() const { return translate(cells, anchor); }

SubsetFamily SubsetFamily::from_lattice(const models::LatticeShapeModel& model) {
  return {model.dimension(), {model.shape()}, {Rational(1)}};
}

SubsetFamily SubsetFamily::from_rods(const models::RodSystem& rods) {
  if (rods.flavor() != models::RodFlavor::discrete) throw ContractError("T~ recursion needs discrete rods");
  SubsetFamily f;
  f.dimension = 1;
  for (std::size_t i = 0; i < rods.lengths().size(); ++i) {
    CellSet s;
    for (int c = 0; c < static_cast<int>(rods.lengths()[i]); ++c) s.push_back({c});
    f.shapes.push_back(std::move(s));
    f.weights.emplace_back(rods.weights()[i]);
  }
  return f;
}

SubsetFamily SubsetFamily::intervals(const std::vector<int>& lengths) {
  SubsetFamily f;
  f.dimension = 1;
  for (int l : lengths) {
    if (l < 1) throw ContractError("interval length must be positive");
    CellSet s;
    for (int c = 0; c < l; ++c) s.push_back({c});
    f.shapes.push_back(std::move(s));
    f.weights.emplace_back(1);
  }
  return f;
}

std::size_t SubsetFamily::max_size() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (weights[i] > 0) m = std::max(m, shapes[i].size());
  return m;
}

int SubsetFamily::size_period() const {
  int g = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (weights[i] > 0) g = std::gcd(g, static_cast<int>(shapes[i].size()));
  return g == 0 ? 1 : g;
}

std::vector<CellSet> SubsetFamily::translates_containing(std::size_t s, const Cell& cell) const {
  std::vector<CellSet> out;
  for (const auto& c : shapes[s]) {
    Cell off(cell.size());
    for (std::size_t i = 0; i < cell.size(); ++i) off[i] = cell[i] - c[i];
    out.push_back(translate(shapes[s], off));
  }
  return out;
}

namespace {

template <typename Number>
Number from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Number, Rational>) {
    return q;
  } else {
    return q.get_d();
  }
}

CellSet canonicalize(const CellSet& cells) {
  if (cells.empty()) return cells;
  Cell back = cells.front();
  for (auto& v : back) v = -v;
  return translate(cells, back);
}

CellSet erase_cell(const CellSet& d, const Cell& x) {
  CellSet out;
  out.reserve(d.size());
  for (const auto& c : d)
    if (c != x) out.push_back(c);
  return out;
}

void validate_family(const SubsetFamily& f) {
  if (f.shapes.empty() || f.shapes.size() != f.weights.size()) throw ContractError("family needs shapes with weights");
  for (std::size_t i = 0; i < f.shapes.size(); ++i) {
    if (f.shapes[i].empty()) throw ContractError("empty shape in family");
    if (f.weights[i] < 0) throw ContractError("negative shape weight");
    for (const auto& c : f.shapes[i])
      if (static_cast<int>(c.size()) != f.dimension) throw ContractError("shape cell has the wrong dimension");
  }
}

}  // namespace

template <typename Number>
TnTable<Number>::TnTable(SubsetFamily family, Number z, CellRule rule, std::size_t cap)
    : family_(std::move(family)), rule_(rule), cap_(cap) {
  validate_family(family_);
  if (z < 0) throw ContractError("activity must be non-negative");
  for (const auto& w : family_.weights) activity_.push_back(z * from_rational<Number>(w));
}

template <typename Number>
Number TnTable<Number>::value(const CellSet& domain, int N) {
  if (N < 1) throw ContractError("truncation order N must be at least 1");
  for (const auto& c : domain)
    if (static_cast<int>(c.size()) != family_.dimension) throw ContractError("domain cell has the wrong dimension");
  return compute(canonicalize(models::make_cell_set(domain)), N);
}

template <typename Number>
Number TnTable<Number>::compute(const CellSet& d, int N) {
  if (d.empty()) return Number(1);
  if (static_cast<int>(d.size()) > N) return Number(0);
  if (N == 1) return Number(1);
  auto key = std::make_pair(d, N);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Cell& x = rule_ == CellRule::leftmost ? d.front() : d.back();
  CellSet rest = erase_cell(d, x);
  Number total = compute(canonicalize(rest), N - 1);
  for (std::size_t s = 0; s < family_.shapes.size(); ++s) {
    if (activity_[s] == 0) continue;
    for (const auto& y : family_.translates_containing(s, x)) {
      if (intersects(y, rest)) continue;
      CellSet grown = set_union(rest, y);
      if (static_cast<int>(grown.size()) > N - 1) continue;
      total += activity_[s] * compute(canonicalize(grown), N - 1);
    }
  }
  if (memo_.size() >= cap_)
    throw CapacityError("T~ memo entries", static_cast<long long>(cap_), static_cast<long long>(memo_.size()) + 1);
  memo_.emplace(std::move(key), total);
  return total;
}

template class TnTable<Rational>;
template class TnTable<double>;

Rational tn_recursive(const SubsetFamily& family, const CellSet& domain, int N, const Rational& z, CellRule rule) {
  TnTable<Rational> t(family, z, rule);
  return t.value(domain, N);
}

Rational tn_direct(const SubsetFamily& family, const CellSet& domain_in, int N, const Rational& z) {
  validate_family(family);
  if (N < 1) throw ContractError("truncation order N must be at least 1");
  if (N > kMaxDirectOrder) throw CapacityError("direct cluster sum order", kMaxDirectOrder, N);
  CellSet domain = models::make_cell_set(domain_in);
  if (domain.empty()) return 1;
  int budget = N - static_cast<int>(domain.size());
  if (budget < 0) return 0;
  int d = family.dimension;
  // Any polymer in a connected cluster lies within `budget` of the domain's bounding box.
  Cell lo = domain.front(), hi = domain.front();
  for (const auto& c : domain)
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
    }
  struct Candidate {
    CellSet cells;
    Rational activity;
  };
  std::vector<Candidate> cand;
  for (std::size_t s = 0; s < family.shapes.size(); ++s) {
    const auto& shape = family.shapes[s];
    if (family.weights[s] == 0 || static_cast<int>(shape.size()) > budget) continue;
    std::set<CellSet> seen;
    // Offsets placing some shape cell inside the dilated box.
    Cell off(static_cast<std::size_t>(d));
    std::function<void(int)> rec = [&](int axis) {
      if (axis == d) {
        CellSet y = translate(shape, off);
        bool inside = std::all_of(y.begin(), y.end(), [&](const Cell& c) {
          for (int i = 0; i < d; ++i)
            if (c[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i)] - budget ||
                c[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)] + budget)
              return false;
          return true;
        });
        if (inside && seen.insert(y).second) cand.push_back({y, z * family.weights[s]});
        return;
      }
      for (int v = lo[static_cast<std::size_t>(axis)] - budget - static_cast<int>(shape.size());
           v <= hi[static_cast<std::size_t>(axis)] + budget; ++v) {
        off[static_cast<std::size_t>(axis)] = v;
        rec(axis + 1);
      }
    };
    rec(0);
  }
  Rational total = 1;
  std::vector<int> chosen;
  std::vector<CellSet> sets{domain};
  std::function<void(std::size_t, int, int, const Rational&)> walk = [&](std::size_t start, int room, int run,
                                                                          const Rational& w) {
    if (!chosen.empty()) {
      std::int64_t phi = ursell_of_sets(sets);
      if (phi != 0) total += w * Rational(static_cast<long>(phi < 0 ? -phi : phi));
    }
    for (std::size_t t = start; t < cand.size(); ++t) {
      int sz = static_cast<int>(cand[t].cells.size());
      if (sz > room) continue;
      bool repeat = !chosen.empty() && t == start;
      int next_run = repeat ? run + 1 : 1;
      chosen.push_back(static_cast<int>(t));
      sets.push_back(cand[t].cells);
      walk(t, room - sz, next_run, w * cand[t].activity / next_run);
      sets.pop_back();
      chosen.pop_back();
    }
  };
  walk(0, budget, 0, Rational(1));
  return total;
}

StabilizationResult stabilization_probe(const SubsetFamily& family, const CellSet& domain, double z, double tol,
                                        int ceiling, double divergence_ratio) {
  TnTable<double> table(family, z);
  int period = static_cast<int>(std::max<std::size_t>(family.max_size(), 1));
  StabilizationResult r{StabilizationResult::Outcome::ceiling, ceiling, period, 0.0, INFINITY};
  int start = static_cast<int>(domain.size()) + period;
  for (int N = std::max(start, 1 + period); N <= ceiling; ++N) {
    double now = table.value(domain, N);
    double before = table.value(domain, N - period);
    r.order = N;
    r.value = now;
    r.relative_change = now > 0 ? (now - before) / now : 0.0;
    if (before > 0 && now / before > divergence_ratio) {
      r.outcome = StabilizationResult::Outcome::diverged;
      return r;
    }
    if (r.relative_change < tol) {
      r.outcome = StabilizationResult::Outcome::stabilized;
      return r;
    }
  }
  r.outcome = StabilizationResult::Outcome::ceiling;
  return r;
}

SetFunction additive_ansatz(double alpha) {
  return [alpha](const CellSet& d) { return alpha * static_cast<double>(d.size()); };
}

SetFunction v_ansatz(const models::LatticeShapeModel& model, double alpha) {
  return [model, alpha](const CellSet& d) { return alpha * static_cast<double>(models::v_count(model, d)); };
}

BfpVerdict bfp_condition_check(const SubsetFamily& family, const SetFunction& a, const Window& window, int size_cap,
                               double z, std::uint64_t domain_cap) {
  validate_family(family);
  if (size_cap < 1) throw ContractError("size_cap must be positive");
  int d = family.dimension;
  if (static_cast<int>(window.lo.size()) != d || static_cast<int>(window.hi.size()) != d)
    throw ContractError("window dimension mismatch");
  std::vector<Cell> cells;
  Cell c(static_cast<std::size_t>(d));
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      cells.push_back(c);
      return;
    }
    for (int v = window.lo[static_cast<std::size_t>(axis)]; v <= window.hi[static_cast<std::size_t>(axis)]; ++v) {
      c[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1);
    }
  };
  rec(0);
  std::vector<double> act;
  for (const auto& w : family.weights) act.push_back(z * w.get_d());

  BfpVerdict out{true, 0, std::nullopt, {}};
  std::vector<Cell> current;
  auto check = [&](const CellSet& dom) {
    std::vector<Attempt> attempts;
    for (const auto& x : dom) {
      CellSet rest = erase_cell(dom, x);
      double base = a(rest);
      double lhs = 0;
      for (std::size_t s = 0; s < family.shapes.size(); ++s) {
        if (act[s] == 0) continue;
        for (const auto& y : family.translates_containing(s, x)) {
          if (intersects(y, rest)) continue;
          lhs += act[s] * std::exp(a(set_union(rest, y)) - base);
        }
      }
      double rhs = std::expm1(a(dom) - base);
      if (lhs <= rhs) return true;
      attempts.push_back({x, lhs, rhs});
    }
    out.holds = false;
    out.failing_domain = dom;
    out.attempts = std::move(attempts);
    return false;
  };
  std::function<bool(std::size_t)> grow = [&](std::size_t start) {
    for (std::size_t t = start; t < cells.size(); ++t) {
      current.push_back(cells[t]);
      if (++out.domains_checked > domain_cap)
        throw CapacityError("domains checked", static_cast<long long>(domain_cap),
                            static_cast<long long>(out.domains_checked));
      if (!check(models::make_cell_set(current))) return false;
      if (static_cast<int>(current.size()) < size_cap && !grow(t + 1)) return false;
      current.pop_back();
    }
    return true;
  };
  grow(0);
  return out;
}

namespace {

double xi_value(const models::AbstractPolymerSystem& sys, const XiAnsatz& an, std::vector<int> tuple) {
  if (tuple.empty()) return 1.0;
  if (an.kind == XiAnsatz::Kind::table) {
    std::sort(tuple.begin(), tuple.end());
    auto it = an.table.find(tuple);
    return it == an.table.end() ? 0.0 : it->second;
  }
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = i + 1; j < tuple.size(); ++j)
      if (sys.incompatible(tuple[i], tuple[j])) return 0.0;
  double v = 1;
  for (int t : tuple) v *= an.mu[static_cast<std::size_t>(t)];
  if (an.kind == XiAnsatz::Kind::new_product) {
    std::vector<bool> covered(static_cast<std::size_t>(sys.size()), false);
    double e = 0;
    for (int t : tuple)
      for (int w : sys.gamma(t))
        if (!covered[static_cast<std::size_t>(w)]) {
          covered[static_cast<std::size_t>(w)] = true;
          e += an.mu[static_cast<std::size_t>(w)];
        }
    v *= std::exp(e);
  }
  return v;
}

}  // namespace

Condition1Verdict ks_condition1_check(const models::AbstractPolymerSystem& sys, const XiAnsatz& an, int n_max,
                                      std::uint64_t tuple_cap) {
  if (n_max < 1) throw ContractError("n_max must be positive");
  if (an.kind != XiAnsatz::Kind::table) {
    if (static_cast<int>(an.mu.size()) != sys.size()) throw ContractError("ansatz needs one mu per polymer");
    for (double m : an.mu)
      if (!(m >= 0)) throw ContractError("mu values must be non-negative");
  }
  std::size_t table_len = 0;
  for (const auto& [k, v] : an.table) {
    table_len = std::max(table_len, k.size());
    if (!(v >= 0)) throw ContractError("table values must be non-negative");
  }
  Condition1Verdict out{true, 0, {}, 0, 0};
  int p = sys.size();
  // Compatible subsets of Gamma(x) per polymer; product ansatz vanish elsewhere.
  std::vector<models::NeighborhoodSummary> nbs;
  if (an.kind != XiAnsatz::Kind::table)
    for (int x = 0; x < p; ++x) nbs.push_back(models::neighborhood(sys, x));
  auto k_operator = [&](const std::vector<int>& x) {
    int xs = x.front();  // first-entry selection
    std::vector<int> rest(x.begin() + 1, x.end());
    for (int r : rest)
      if (sys.incompatible(xs, r)) return 0.0;
    double inner = rest.empty() ? 0.0 : xi_value(sys, an, rest);
    if (an.kind != XiAnsatz::Kind::table) {
      for (const auto& s : nbs[static_cast<std::size_t>(xs)].subsets) {
        if (s.members.empty()) continue;
        std::vector<int> t = rest;
        t.insert(t.end(), s.members.begin(), s.members.end());
        inner += xi_value(sys, an, t);
      }
    } else {
      int room = static_cast<int>(table_len) - static_cast<int>(rest.size());
      if (room >= 1) {
        const auto& pool = sys.gamma(xs);
        std::vector<int> cur;
        std::function<void(std::size_t, int, double)> rec = [&](std::size_t start, int run, double w) {
          if (!cur.empty()) {
            std::vector<int> t = rest;
            t.insert(t.end(), cur.begin(), cur.end());
            inner += w * xi_value(sys, an, t);
          }
          if (static_cast<int>(cur.size()) == room) return;
          for (std::size_t i = start; i < pool.size(); ++i) {
            bool repeat = !cur.empty() && i == start;
            int nr = repeat ? run + 1 : 1;
            cur.push_back(pool[i]);
            rec(i, nr, w / nr);
            cur.pop_back();
          }
        };
        rec(0, 0, 1.0);
      }
    }
    return sys.activity_value(xs) * inner;
  };
  for (int n = 1; n <= n_max && out.holds; ++n) {
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int pos) {
      if (!out.holds) return;
      if (pos == n) {
        if (++out.tuples_checked > tuple_cap)
          throw CapacityError("condition tuples", static_cast<long long>(tuple_cap),
                              static_cast<long long>(out.tuples_checked));
        double lhs = (n == 1 ? sys.activity_value(x[0]) : 0.0) + k_operator(x);
        double rhs = xi_value(sys, an, x);
        if (!(lhs <= rhs)) {
          out.holds = false;
          out.failing_tuple = x;
          out.lhs = lhs;
          out.rhs = rhs;
        }
        return;
      }
      for (int v = 0; v < p; ++v) {
        x[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1);
      }
    };
    rec(0);
  }
  return out;
}

double necessary_decay(const SubsetFamily& family, double z, const Cell& x) {
  validate_family(family);
  if (!(z >= 0)) throw ContractError("activity must be non-negative");
  double total = 0;
  for (std::size_t s = 0; s < family.shapes.size(); ++s) {
    double zs = z * family.weights[s].get_d();
    if (zs == 0) continue;
    for (const auto& y : family.translates_containing(s, x)) {
      double v = 0;
      for (std::size_t t = 0; t < family.shapes.size(); ++t) {
        std::set<Cell> offsets;
        for (const auto& c : y)
          for (const auto& sc : family.shapes[t]) {
            Cell o(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) o[i] = c[i] - sc[i];
            offsets.insert(std::move(o));
          }
        v += z * family.weights[t].get_d() * static_cast<double>(offsets.size());
      }
      total += zs * std::exp(v);
    }
  }
  return total;
}

double beta_coefficient(const QGraph& q, std::uint32_t excluded) {
  if (q.size < 0 || q.size > kMaxQGraphSize) throw CapacityError("Q size", kMaxQGraphSize, q.size);
  if (static_cast<int>(q.adjacency.size()) != q.size || static_cast<int>(q.mu.size()) != q.size)
    throw ContractError("QGraph adjacency and mu must have one entry per vertex");
  std::uint32_t all = q.size == 32 ? ~0u : ((1u << q.size) - 1u);
  if ((excluded & ~all) != 0) throw ContractError("U must be a subset of Q");
  for (int i = 0; i < q.size; ++i) {
    if ((q.adjacency[static_cast<std::size_t>(i)] >> i) & 1u) throw ContractError("QGraph adjacency must be irreflexive");
    for (int j = 0; j < q.size; ++j)
      if (((q.adjacency[static_cast<std::size_t>(i)] >> j) & 1u) != ((q.adjacency[static_cast<std::size_t>(j)] >> i) & 1u))
        throw ContractError("QGraph adjacency must be symmetric");
  }
  std::uint32_t free = all & ~excluded;
  auto exp_minus = [&](std::uint32_t mask) {
    double e = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) e += q.mu[static_cast<std::size_t>(std::countr_zero(m))];
    return std::exp(-e);
  };
  double beta = exp_minus(free);
  // Nonempty independent subsets C of Q \ U.
  for (std::uint32_t c = free; c; c = (c - 1) & free) {
    bool independent = true;
    std::uint32_t closure = 0;
    double prod = 1;
    for (std::uint32_t m = c; m; m &= m - 1) {
      int v = std::countr_zero(m);
      if (q.adjacency[static_cast<std::size_t>(v)] & c) {
        independent = false;
        break;
      }
      closure |= q.closed_neighborhood(v);
      prod *= q.mu[static_cast<std::size_t>(v)];
    }
    if (!independent) continue;
    beta += prod * exp_minus(free & ~closure);
  }
  return beta;
}

std::int64_t ursell_of_sets(const std::vector<CellSet>& sets) {
  std::vector<std::uint32_t> adj(sets.size(), 0u);
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (intersects(sets[i], sets[j])) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
      }
  return graphkit::ursell_hard_core(adj);
}

IntIdentity check_phirecurr(const CellSet& rest, const Cell& x, const std::vector<CellSet>& ys) {
  if (std::binary_search(rest.begin(), rest.end(), x)) throw ContractError("x must lie outside D'");
  if (ys.empty()) throw ContractError("need k >= 1 polymers");
  std::vector<CellSet> lhs_sets{set_union(rest, CellSet{x})};
  lhs_sets.insert(lhs_sets.end(), ys.begin(), ys.end());
  std::int64_t lhs = ursell_of_sets(lhs_sets);
  std::vector<CellSet> base{rest};
  base.insert(base.end(), ys.begin(), ys.end());
  std::int64_t rhs = ursell_of_sets(base);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    bool contains = std::binary_search(ys[i].begin(), ys[i].end(), x);
    if (!contains || intersects(ys[i], rest)) continue;
    std::vector<CellSet> sets{set_union(rest, ys[i])};
    for (std::size_t j = 0; j < ys.size(); ++j)
      if (j != i) sets.push_back(ys[j]);
    rhs -= sets.size() == 1 ? 1 : ursell_of_sets(sets);
  }
  return {lhs == rhs, lhs, rhs};
}

IntIdentity check_prec(const CellSet& d0, const CellSet& d1, const std::vector<CellSet>& ys) {
  if (d0.empty()) throw ContractError("D0 must be nonempty");
  if (intersects(d0, d1)) throw ContractError("D0 and D1 must be disjoint");
  std::size_t k = ys.size();
  if (k == 0 || k > 16) throw ContractError("need 1 <= k <= 16 polymers");
  std::vector<CellSet> lhs_sets{set_union(d0, d1)};
  lhs_sets.insert(lhs_sets.end(), ys.begin(), ys.end());
  std::int64_t lhs = ursell_of_sets(lhs_sets);
  std::int64_t rhs = 0;
  for (std::uint32_t sel = 0; sel < (1u << k); ++sel) {
    bool indicator = true;
    CellSet merged = d1;
    for (std::size_t i = 0; i < k && indicator; ++i) {
      if (!((sel >> i) & 1u)) continue;
      if (!intersects(d0, ys[i]) || intersects(d1, ys[i])) indicator = false;
      for (std::size_t j = i + 1; j < k && indicator; ++j)
        if (((sel >> j) & 1u) && intersects(ys[i], ys[j])) indicator = false;
      merged = set_union(merged, ys[i]);
    }
    if (!indicator) continue;
    std::vector<CellSet> sets{merged};
    for (std::size_t j = 0; j < k; ++j)
      if (!((sel >> j) & 1u)) sets.push_back(ys[j]);
    std::int64_t phi = sets.size() == 1 ? 1 : ursell_of_sets(sets);
    rhs += (std::popcount(sel) % 2 == 0) ? phi : -phi;
  }
  return {lhs == rhs, lhs, rhs};
}

}  // namespace kscluster::kssolver
