#include "kscluster/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "kscluster/errors.hpp"
#include "kscluster/ks_partial.hpp"
#include "kscluster/kssolver.hpp"
#include "kscluster/models.hpp"

namespace kscluster::suites {

using nlohmann::json;
using graphkit::PointConfig;
using models::Cell;
using models::CellSet;

namespace {

json matrix_json(const PointConfig& cfg) {
  json rows = json::array();
  for (const auto& r : cfg.matrix()) {
    json row = json::array();
    for (const auto& q : r) row.push_back(to_string(q));
    rows.push_back(row);
  }
  return rows;
}

json sets_json(const std::vector<CellSet>& sets) {
  json out = json::array();
  for (const auto& s : sets) {
    json cells = json::array();
    for (const auto& c : s) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

// Splits a total vertex count into (roots, extras) with roots >= 1.
std::pair<int, int> split(Rng& rng, int total) {
  int n = rng.range(1, total);
  return {n, total - n};
}

CellSet interval(int start, int length) {
  CellSet s;
  for (int i = 0; i < length; ++i) s.push_back({start + i});
  return s;
}

CellSet random_subset(Rng& rng, int lo, int hi, int max_size, const CellSet& avoid = {}) {
  int size = rng.range(0, max_size);
  std::vector<Cell> cells;
  for (int t = 0; t < size * 4 && static_cast<int>(cells.size()) < size; ++t) {
    Cell c{rng.range(lo, hi)};
    if (std::binary_search(avoid.begin(), avoid.end(), c)) continue;
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  return models::make_cell_set(std::move(cells));
}

// Short rods on Z near the window, biased toward covering `near`.
std::vector<CellSet> random_rods(Rng& rng, int k, int near, int lo, int hi) {
  std::vector<CellSet> ys;
  for (int i = 0; i < k; ++i) {
    int len = rng.range(2, 3);
    int start = rng.coin() ? near - rng.range(0, len - 1) : rng.range(lo - 1, hi);
    ys.push_back(interval(start, len));
  }
  return ys;
}

SuiteResult named(std::string name) {
  SuiteResult r;
  r.name = std::move(name);
  return r;
}

void fail(SuiteResult& r, json detail) {
  if (!r.ok) return;
  r.ok = false;
  r.counterexample = std::move(detail);
}

SuiteResult forest_graph(const SuiteOptions& o) {
  SuiteResult r = named("forest-graph");
  Rng rng(o.seed);
  for (int t = 0; t < o.trials && r.ok; ++t) {
    auto [n, k] = split(rng, rng.range(2, graphkit::kMaxIdentityVertices));
    PointConfig cfg = random_hard_core(rng, n + k);
    auto sides = graphkit::verify_forest_graph_equality(n, k, cfg);
    ++r.checks;
    if (!sides.equal)
      fail(r, {{"n", n}, {"k", k}, {"mayer", matrix_json(cfg)}, {"forest_side", to_string(sides.lhs)},
               {"graph_side", to_string(sides.rhs)}});
  }
  for (const auto& cfg : o.points) {
    for (int n = 1; n <= cfg.size() && cfg.size() <= graphkit::kMaxIdentityVertices && r.ok; ++n) {
      auto sides = graphkit::verify_forest_graph_equality(n, cfg.size() - n, cfg);
      ++r.checks;
      if (!sides.equal) fail(r, {{"n", n}, {"mayer", matrix_json(cfg)}});
    }
  }
  return r;
}

SuiteResult partition_scheme(const SuiteOptions&) {
  SuiteResult r = named("partition-scheme");
  std::uint64_t graphs = 0;
  for (int total = 1; total <= 6 && r.ok; ++total)
    for (int n = 1; n <= total && r.ok; ++n) {
      auto rep = graphkit::verify_partition_scheme(n, total - n);
      ++r.checks;
      graphs += rep.graphs;
      if (!rep.ok) fail(r, {{"n", n}, {"k", total - n}, {"detail", rep.detail}});
    }
  r.stats["graphs"] = graphs;
  return r;
}

SuiteResult psi_methods(const SuiteOptions& o) {
  SuiteResult r = named("psi-methods");
  Rng rng(o.seed);
  const std::vector<graphkit::SelectionRule> rules{graphkit::SelectionRule::first(), graphkit::SelectionRule::last(),
                                                   graphkit::SelectionRule::max_label()};
  auto check = [&](int n, const PointConfig& cfg) {
    Rational brute = graphkit::psi(n, cfg, graphkit::PsiMethod::brute);
    Rational parts = graphkit::psi(n, cfg, graphkit::PsiMethod::partitions);
    bool ok = brute == parts;
    json rec = json::object();
    for (const auto& rule : rules) {
      Rational v = graphkit::psi(n, cfg, graphkit::PsiMethod::recursion, rule);
      rec[rule.name()] = to_string(v);
      ok = ok && v == brute;
    }
    if (n == 1) {
      Rational ub = graphkit::ursell(cfg, graphkit::UrsellMethod::brute);
      Rational ur = graphkit::ursell(cfg, graphkit::UrsellMethod::recurrence);
      ok = ok && ub == ur && ub == brute;
    }
    ++r.checks;
    if (!ok)
      fail(r, {{"n", n}, {"mayer", matrix_json(cfg)}, {"brute", to_string(brute)}, {"partitions", to_string(parts)},
               {"recursion", rec}});
  };
  for (int t = 0; t < o.trials && r.ok; ++t) {
    auto [n, k] = split(rng, rng.range(1, 6));
    check(n, random_hard_core(rng, n + k));
    if (r.ok) check(n, random_rational_mayer(rng, n + k));
  }
  for (const auto& cfg : o.points)
    for (int n = 1; n <= cfg.size() && cfg.size() <= graphkit::kMaxBruteVertices && r.ok; ++n) check(n, cfg);
  return r;
}

SuiteResult psi_factorization(const SuiteOptions& o) {
  SuiteResult r = named("psi-factorization");
  Rng rng(o.seed);
  auto check = [&](int n, const PointConfig& cfg) {
    Rational full = graphkit::psi(n, cfg, graphkit::PsiMethod::brute);
    Rational red = graphkit::psi_reduced(n, cfg);
    Rational prod = graphkit::root_product(n, cfg);
    ++r.checks;
    if (full != prod * red)
      fail(r, {{"n", n}, {"mayer", matrix_json(cfg)}, {"psi", to_string(full)}, {"root_product", to_string(prod)},
               {"psi_reduced", to_string(red)}});
  };
  for (int t = 0; t < o.trials && r.ok; ++t) {
    auto [n, k] = split(rng, rng.range(1, 6));
    check(n, random_hard_core(rng, n + k));
    if (r.ok) check(n, random_rational_mayer(rng, n + k));
  }
  return r;
}

SuiteResult altsign(const SuiteOptions& o) {
  SuiteResult r = named("altsign");
  for (const auto& cfg : o.points)
    if (!cfg.is_non_negative_potential())
      throw ContractError("altsign: supplied Mayer matrix has an entry outside [-1, 0]");
  Rng rng(o.seed);
  auto check = [&](int n, const PointConfig& cfg) {
    int k = cfg.size() - n;
    ++r.checks;
    if (!graphkit::alternating_sign_check(n, k, cfg)) {
      fail(r, {{"n", n}, {"k", k}, {"mayer", matrix_json(cfg)},
               {"psi", to_string(graphkit::psi(n, cfg, graphkit::PsiMethod::partitions))}});
      return;
    }
    if (n == 1) {
      // Ursell sign (-1)^(m-1) for m points.
      Rational u = graphkit::ursell(cfg);
      bool ok = (cfg.size() % 2 == 1) ? u >= 0 : u <= 0;
      if (!ok) fail(r, {{"ursell_size", cfg.size()}, {"mayer", matrix_json(cfg)}, {"ursell", to_string(u)}});
    }
  };
  for (int t = 0; t < o.trials && r.ok; ++t) {
    auto [n, k] = split(rng, rng.range(1, graphkit::kMaxBruteVertices));
    check(n, rng.coin() ? random_hard_core(rng, n + k) : random_rational_mayer(rng, n + k));
  }
  for (const auto& cfg : o.points)
    for (int n = 1; n <= cfg.size() && cfg.size() <= graphkit::kMaxBruteVertices && r.ok; ++n) check(n, cfg);
  return r;
}

SuiteResult phirecurr(const SuiteOptions& o) {
  SuiteResult r = named("phirecurr");
  Rng rng(o.seed);
  for (int t = 0; t < o.trials && r.ok; ++t) {
    Cell x{rng.range(0, 7)};
    CellSet rest = random_subset(rng, 0, 7, 3, CellSet{x});
    auto ys = random_rods(rng, rng.range(1, 3), x[0], 0, 7);
    auto id = kssolver::check_phirecurr(rest, x, ys);
    ++r.checks;
    if (!id.equal)
      fail(r, {{"rest", sets_json({rest})[0]}, {"x", x}, {"polymers", sets_json(ys)}, {"lhs", id.lhs}, {"rhs", id.rhs}});
  }
  return r;
}

SuiteResult prec(const SuiteOptions& o) {
  SuiteResult r = named("prec");
  Rng rng(o.seed);
  for (int t = 0; t < o.trials && r.ok; ++t) {
    int a = rng.range(0, 6);
    int b = rng.coin() ? a + 1 : rng.range(0, 7);
    if (b == a) b = a + 1;
    CellSet d0 = models::make_cell_set({{a}, {b}});
    CellSet d1 = random_subset(rng, 0, 7, 3, d0);
    auto ys = random_rods(rng, rng.range(1, 3), a, 0, 7);
    auto id = kssolver::check_prec(d0, d1, ys);
    ++r.checks;
    if (!id.equal)
      fail(r, {{"d0", sets_json({d0})[0]}, {"d1", sets_json({d1})[0]}, {"polymers", sets_json(ys)}, {"lhs", id.lhs},
               {"rhs", id.rhs}});
  }
  return r;
}

SuiteResult hc1(const SuiteOptions& o) {
  SuiteResult r = named("hc1");
  Rng rng(o.seed);
  for (int t = 0; t < o.trials && r.ok; ++t) {
    int n = rng.range(1, 3);
    int k = rng.range(0, std::min(3, graphkit::kMaxBruteVertices - n));
    // Disjoint root rods laid out left to right with random gaps.
    std::vector<CellSet> sets;
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      pos += rng.range(0, 2);
      int len = rng.range(1, 2);
      sets.push_back(interval(pos, len));
      pos += len;
    }
    for (const auto& y : random_rods(rng, k, rng.range(0, std::max(pos - 1, 0)), 0, pos)) sets.push_back(y);
    PointConfig cfg = PointConfig::hard_core(static_cast<int>(sets.size()),
                                             [&](int i, int j) { return models::intersects(sets[static_cast<std::size_t>(i)], sets[static_cast<std::size_t>(j)]); });
    Rational red = graphkit::psi_reduced(n, cfg);
    CellSet merged;
    for (int i = 0; i < n; ++i) merged = models::set_union(merged, sets[static_cast<std::size_t>(i)]);
    std::vector<CellSet> cluster{merged};
    cluster.insert(cluster.end(), sets.begin() + n, sets.end());
    std::int64_t phi = cluster.size() == 1 ? 1 : kssolver::ursell_of_sets(cluster);
    ++r.checks;
    if (red != Rational(static_cast<long>(phi)))
      fail(r, {{"roots", n}, {"sets", sets_json(sets)}, {"psi_reduced", to_string(red)}, {"ursell_union", phi}});
  }
  return r;
}

models::AbstractPolymerSystem random_dimer_system(Rng& rng) {
  int m = rng.range(1, 4);
  std::vector<std::string> ids;
  std::vector<Rational> acts;
  std::vector<std::pair<int, int>> pairs;
  int start = 0;
  std::vector<int> starts;
  for (int i = 0; i < m; ++i) {
    start += rng.range(0, 2);
    starts.push_back(start);
    ids.push_back("D" + std::to_string(start));
    acts.emplace_back(rng.range(1, 4), rng.range(1, 6));
    acts.back().canonicalize();
    ++start;
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (starts[static_cast<std::size_t>(j)] - starts[static_cast<std::size_t>(i)] <= 1) pairs.emplace_back(i, j);
  return models::AbstractPolymerSystem::from_pairs(ids, acts, pairs);
}

SuiteResult ks_partial(const SuiteOptions& o) {
  SuiteResult r = named("ks-partial");
  Rng rng(o.seed);
  auto run = [&](const models::AbstractPolymerSystem& sys, int n_max, int N_max) {
    auto res = graphkit::verify_ks_recursion_partial(sys, n_max, N_max);
    r.checks += res.checks;
    if (!res.holds) {
      json ids = json::array();
      for (int i = 0; i < sys.size(); ++i) ids.push_back(sys.id(i));
      fail(r, {{"polymers", ids}, {"detail", res.counterexample}});
    }
  };
  // Two overlapping dimers {0,1} and {1,2}.
  run(models::AbstractPolymerSystem::from_pairs({"D0", "D1"}, {Rational(1, 3), Rational(1, 2)}, {{0, 1}}), 2, 4);
  for (int t = 0; t < o.trials && r.ok; ++t) run(random_dimer_system(rng), 2, rng.range(1, 4));
  return r;
}

SuiteResult beta(const SuiteOptions& o) {
  SuiteResult r = named("beta");
  Rng rng(o.seed);
  double min_beta = std::numeric_limits<double>::infinity();
  for (int t = 0; t < o.trials && r.ok; ++t) {
    kssolver::QGraph q;
    q.size = rng.range(1, 8);
    q.adjacency.assign(static_cast<std::size_t>(q.size), 0u);
    double p = rng.unit();
    for (int i = 0; i < q.size; ++i) {
      q.mu.push_back(3.0 * rng.unit());
      for (int j = i + 1; j < q.size; ++j)
        if (rng.coin(p)) {
          q.adjacency[static_cast<std::size_t>(i)] |= 1u << j;
          q.adjacency[static_cast<std::size_t>(j)] |= 1u << i;
        }
    }
    std::uint32_t u = static_cast<std::uint32_t>(rng.below(1ull << q.size));
    double b = kssolver::beta_coefficient(q, u);
    ++r.checks;
    min_beta = std::min(min_beta, b);
    if (!(b >= 1.0 - 1e-12)) fail(r, {{"size", q.size}, {"adjacency", q.adjacency}, {"mu", q.mu}, {"U", u}, {"beta", b}});
  }
  r.stats["min_beta"] = min_beta;
  return r;
}

SuiteResult subadditivity(const SuiteOptions& o) {
  SuiteResult r = named("subadditivity");
  const std::vector<std::pair<std::string, models::LatticeShapeModel>> shapes{
      {"dimer-1d", models::LatticeShapeModel(1, {{0}, {1}})},
      {"dimer-2d", models::LatticeShapeModel(2, {{0, 0}, {1, 0}})},
      {"cube-2x2", models::LatticeShapeModel::cube(2, 2)}};
  for (std::size_t i = 0; i < shapes.size() && r.ok; ++i) {
    auto res = models::strong_subadditivity_check(shapes[i].second, o.trials, o.seed + i);
    r.checks += static_cast<std::uint64_t>(res.trials);
    if (!res.ok) {
      json ce = {{"model", shapes[i].first}};
      if (res.counterexample) {
        ce["B"] = sets_json({res.counterexample->first})[0];
        ce["C"] = sets_json({res.counterexample->second})[0];
      }
      fail(r, ce);
    }
  }
  return r;
}

using Runner = std::function<SuiteResult(const SuiteOptions&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> m{
      {"forest-graph", forest_graph}, {"partition-scheme", partition_scheme}, {"psi-methods", psi_methods},
      {"psi-factorization", psi_factorization}, {"altsign", altsign}, {"phirecurr", phirecurr},
      {"prec", prec}, {"hc1", hc1}, {"ks-partial", ks_partial}, {"beta", beta}, {"subadditivity", subadditivity}};
  return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"forest-graph", "partition-scheme", "psi-methods", "psi-factorization",
                                              "altsign", "phirecurr", "prec", "hc1", "ks-partial", "beta",
                                              "subadditivity"};
  return names;
}

bool is_suite(const std::string& name) { return registry().count(name) > 0; }

SuiteResult run_suite(const std::string& name, const SuiteOptions& opts) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ContractError("unknown suite \"" + name + "\"");
  if (opts.trials < 0) throw ContractError("trials must be non-negative");
  return it->second(opts);
}

PointConfig random_hard_core(Rng& rng, int n) {
  double p = 0.2 + 0.6 * rng.unit();
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.coin(p);
  return PointConfig::hard_core(n, [&](int i, int j) {
    return i < j ? adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                 : adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  });
}

PointConfig random_rational_mayer(Rng& rng, int n) {
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int den = rng.range(1, 8);
      Rational v(-rng.range(0, den), den);
      v.canonicalize();
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  return PointConfig(m);
}

}  // namespace kscluster::suites
