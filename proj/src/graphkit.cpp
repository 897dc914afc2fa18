#include "kscluster/graphkit.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "kscluster/errors.hpp"

namespace kscluster::graphkit {

namespace {

void require_size(const char* what, int size, int cap) {
  if (size > cap) throw CapacityError(std::string(what) + " vertex count", cap, size);
}

std::uint32_t component_of(std::span<const std::uint32_t> adj, std::uint32_t seed, std::uint32_t universe) {
  std::uint32_t seen = seed;
  std::uint32_t frontier = seed;
  while (frontier != 0) {
    int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    std::uint32_t fresh = adj[static_cast<std::size_t>(v)] & universe & ~seen;
    seen |= fresh;
    frontier |= fresh;
  }
  return seen;
}

bool connected_adj(std::span<const std::uint32_t> adj, int n) {
  if (n <= 1) return true;
  std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1u);
  return component_of(adj, 1u, all) == all;
}

bool root_connected_adj(std::span<const std::uint32_t> adj, int n, int roots) {
  std::uint32_t all = (1u << n) - 1u;
  std::uint32_t root_mask = (1u << roots) - 1u;
  return component_of(adj, root_mask, all) == all;
}

struct Pair {
  int i, j;
};

// Depth-first walk over subsets of `pairs`, invoking `leaf` with the adjacency of each subset.
template <typename Acc, typename Weight, typename Leaf>
void walk_subsets(const std::vector<Pair>& pairs, const std::vector<Weight>& weights, std::size_t idx,
                  std::vector<std::uint32_t>& adj, const Acc& running, const Leaf& leaf) {
  if (idx == pairs.size()) {
    leaf(adj, running);
    return;
  }
  walk_subsets(pairs, weights, idx + 1, adj, running, leaf);
  auto [i, j] = pairs[idx];
  adj[static_cast<std::size_t>(i)] ^= 1u << j;
  adj[static_cast<std::size_t>(j)] ^= 1u << i;
  Acc next = running * weights[idx];
  walk_subsets(pairs, weights, idx + 1, adj, next, leaf);
  adj[static_cast<std::size_t>(i)] ^= 1u << j;
  adj[static_cast<std::size_t>(j)] ^= 1u << i;
}

// Sum of Mayer weights over graphs whose edges avoid zero entries and `skip`,
// restricted to graphs accepted by `keep`.
template <typename Keep, typename Skip>
Rational brute_sum(const PointConfig& cfg, const Keep& keep, const Skip& skip) {
  int n = cfg.size();
  std::vector<Pair> pairs;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (cfg.f(i, j) != 0 && !skip(i, j)) pairs.push_back({i, j});
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0u);
  if (cfg.is_hard_core()) {
    std::vector<long long> w(pairs.size(), -1);
    long long total = 0;
    walk_subsets(pairs, w, 0, adj, 1LL, [&](const std::vector<std::uint32_t>& a, long long s) {
      if (keep(a)) total += s;
    });
    return Rational(static_cast<long>(total));
  }
  std::vector<Rational> w;
  for (auto [i, j] : pairs) w.push_back(cfg.f(i, j));
  Rational total = 0;
  walk_subsets(pairs, w, 0, adj, Rational(1), [&](const std::vector<std::uint32_t>& a, const Rational& s) {
    if (keep(a)) total += s;
  });
  return total;
}

}  // namespace

PointConfig::PointConfig(std::vector<std::vector<Rational>> mayer) {
  n_ = static_cast<int>(mayer.size());
  if (n_ < 1) throw ContractError("mayer matrix must be nonempty");
  m_.resize(static_cast<std::size_t>(n_ * n_));
  for (int i = 0; i < n_; ++i) {
    if (static_cast<int>(mayer[static_cast<std::size_t>(i)].size()) != n_)
      throw ContractError("mayer matrix must be square");
    for (int j = 0; j < n_; ++j) m_[static_cast<std::size_t>(i * n_ + j)] = mayer[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < n_; ++i) {
    m_[static_cast<std::size_t>(i * n_ + i)] = 0;
    for (int j = i + 1; j < n_; ++j)
      if (f(i, j) != f(j, i))
        throw ContractError("mayer matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
}

PointConfig PointConfig::hard_core(int n, const std::function<bool(int, int)>& incompatible) {
  if (n < 1) throw ContractError("point count must be positive");
  PointConfig c;
  c.n_ = n;
  c.m_.assign(static_cast<std::size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (incompatible(i, j)) {
        c.m_[static_cast<std::size_t>(i * n + j)] = -1;
        c.m_[static_cast<std::size_t>(j * n + i)] = -1;
      }
  return c;
}

bool PointConfig::is_hard_core() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (f(i, j) != 0 && f(i, j) != -1) return false;
  return true;
}

bool PointConfig::is_non_negative_potential() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (f(i, j) > 0 || f(i, j) < -1) return false;
  return true;
}

PointConfig PointConfig::restricted(std::span<const int> indices) const {
  PointConfig c;
  c.n_ = static_cast<int>(indices.size());
  c.m_.resize(static_cast<std::size_t>(c.n_ * c.n_));
  for (int a = 0; a < c.n_; ++a)
    for (int b = 0; b < c.n_; ++b)
      c.m_[static_cast<std::size_t>(a * c.n_ + b)] =
          a == b ? Rational(0) : f(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
  return c;
}

std::vector<std::vector<Rational>> PointConfig::matrix() const {
  std::vector<std::vector<Rational>> out(static_cast<std::size_t>(n_), std::vector<Rational>(static_cast<std::size_t>(n_)));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = f(i, j);
  return out;
}

GraphOnN::GraphOnN(int vertices, int roots, std::uint64_t edges)
    : vertices_(vertices), roots_(roots), edges_(edges) {
  if (vertices < 0 || vertices > kMaxVertices) throw CapacityError("graph vertex count", kMaxVertices, vertices);
  if (roots < 0 || roots > vertices) throw ContractError("root count must lie in [0, vertices]");
  int slots = vertices * (vertices - 1) / 2;
  if (slots < 64 && (edges >> slots) != 0) throw ContractError("edge mask uses slots beyond the vertex count");
}

int GraphOnN::pair_slot(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j - 1) / 2 + i;
}

bool GraphOnN::has_edge(int i, int j) const {
  if (i == j) return false;
  return (edges_ >> pair_slot(i, j)) & 1u;
}

void GraphOnN::add_edge(int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= vertices_ || j >= vertices_)
    throw ContractError("edge endpoints must be distinct vertices");
  edges_ |= std::uint64_t{1} << pair_slot(i, j);
}

int GraphOnN::edge_count() const { return std::popcount(edges_); }

std::vector<std::pair<int, int>> GraphOnN::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int j = 1; j < vertices_; ++j)
    for (int i = 0; i < j; ++i)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<std::uint32_t> GraphOnN::adjacency() const {
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(vertices_), 0u);
  for (auto [i, j] : edges()) {
    adj[static_cast<std::size_t>(i)] |= 1u << j;
    adj[static_cast<std::size_t>(j)] |= 1u << i;
  }
  return adj;
}

bool GraphOnN::is_connected() const { return connected_adj(adjacency(), vertices_); }

bool GraphOnN::is_root_connected() const {
  if (roots_ == 0) return vertices_ == 0;
  return root_connected_adj(adjacency(), vertices_, roots_);
}

void enumerate_graphs(int vertices, int roots, GraphClass cls, const std::function<void(const GraphOnN&)>& visit) {
  if (vertices < 1) throw ContractError("vertex count must be positive");
  require_size("graph enumeration", vertices, kMaxBruteVertices);
  if (cls == GraphClass::root_connected && (roots < 1 || roots > vertices))
    throw ContractError("root-connected class needs 1 <= roots <= vertices");
  if (roots < 0 || roots > vertices) throw ContractError("root count must lie in [0, vertices]");
  int slots = vertices * (vertices - 1) / 2;
  std::uint64_t total = std::uint64_t{1} << slots;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    GraphOnN g(vertices, roots, mask);
    bool ok = true;
    if (cls == GraphClass::connected) ok = g.is_connected();
    if (cls == GraphClass::root_connected) ok = g.is_root_connected();
    if (ok) visit(g);
  }
}

std::uint64_t count_graphs(int vertices, int roots, GraphClass cls) {
  std::uint64_t count = 0;
  enumerate_graphs(vertices, roots, cls, [&](const GraphOnN&) { ++count; });
  return count;
}

Rational graph_weight(const GraphOnN& g, const PointConfig& cfg) {
  if (g.vertices() != cfg.size())
    throw ContractError("graph has " + std::to_string(g.vertices()) + " vertices but config has " +
                        std::to_string(cfg.size()) + " points");
  Rational w = 1;
  for (auto [i, j] : g.edges()) w *= cfg.f(i, j);
  return w;
}

std::vector<Rational> ursell_all_subsets(const PointConfig& cfg) {
  int n = cfg.size();
  require_size("ursell recurrence", n, kMaxRecurrenceVertices);
  std::size_t full = std::size_t{1} << n;
  // z[V] = product of (1 + f) over pairs inside V: the sum over all graphs on V.
  std::vector<Rational> z(full);
  z[0] = 1;
  for (std::size_t v = 1; v < full; ++v) {
    int top = 31 - std::countl_zero(static_cast<std::uint32_t>(v));
    std::size_t rest = v & ~(std::size_t{1} << top);
    Rational prod = z[rest];
    for (std::size_t r = rest; r != 0; r &= r - 1) {
      int u = std::countr_zero(static_cast<std::uint32_t>(r));
      const Rational& fu = cfg.f(u, top);
      if (fu != 0) prod *= 1 + fu;
      if (prod == 0) break;
    }
    z[v] = prod;
  }
  std::vector<Rational> phi(full);
  phi[0] = 0;
  Rational acc;
  for (std::size_t v = 1; v < full; ++v) {
    std::size_t low = v & (~v + 1);
    std::size_t others = v & ~low;
    acc = z[v];
    // W ranges over proper subsets of V containing the lowest vertex.
    if (others != 0) {
      for (std::size_t sub = (others - 1) & others;; sub = (sub - 1) & others) {
        std::size_t w = sub | low;
        std::size_t comp = v & ~w;
        if (z[comp] != 0 && phi[w] != 0) acc -= phi[w] * z[comp];
        if (sub == 0) break;
      }
    }
    phi[v] = acc;
  }
  return phi;
}

std::int64_t ursell_hard_core(std::span<const std::uint32_t> adjacency) {
  int n = static_cast<int>(adjacency.size());
  if (n == 0) return 0;
  require_size("hard-core ursell", n, 20);
  if (!connected_adj(adjacency, n)) return 0;
  std::size_t full = std::size_t{1} << n;
  std::vector<std::uint8_t> independent(full, 0);
  independent[0] = 1;
  for (std::size_t v = 1; v < full; ++v) {
    int top = 31 - std::countl_zero(static_cast<std::uint32_t>(v));
    std::size_t rest = v & ~(std::size_t{1} << top);
    independent[v] = independent[rest] && (adjacency[static_cast<std::size_t>(top)] & rest) == 0;
  }
  std::vector<std::int64_t> phi(full, 0);
  for (std::size_t v = 1; v < full; ++v) {
    std::size_t low = v & (~v + 1);
    std::size_t others = v & ~low;
    std::int64_t acc = independent[v];
    if (others != 0) {
      for (std::size_t sub = (others - 1) & others;; sub = (sub - 1) & others) {
        std::size_t w = sub | low;
        if (independent[v & ~w]) acc -= phi[w];
        if (sub == 0) break;
      }
    }
    phi[v] = acc;
  }
  return phi[full - 1];
}

Rational ursell(const PointConfig& cfg, UrsellMethod method) {
  int n = cfg.size();
  if (method == UrsellMethod::brute) {
    require_size("ursell brute force", n, kMaxBruteVertices);
    return brute_sum(
        cfg, [n](const std::vector<std::uint32_t>& a) { return connected_adj(a, n); },
        [](int, int) { return false; });
  }
  return ursell_all_subsets(cfg)[(std::size_t{1} << n) - 1];
}

SelectionRule SelectionRule::first() {
  return SelectionRule("first", [](std::span<const int>) { return std::size_t{0}; });
}

SelectionRule SelectionRule::last() {
  return SelectionRule("last", [](std::span<const int> t) { return t.size() - 1; });
}

SelectionRule SelectionRule::max_label() {
  return SelectionRule("max-label", [](std::span<const int> t) {
    return static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
  });
}

std::size_t SelectionRule::select(std::span<const int> tuple) const {
  if (tuple.empty()) throw ContractError("selection rule applied to an empty tuple");
  std::size_t s = fn_(tuple);
  if (s >= tuple.size()) throw ContractError("selection rule '" + name_ + "' returned an out-of-range index");
  return s;
}

Rational root_product(int n, const PointConfig& cfg) {
  Rational p = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p *= 1 + cfg.f(i, j);
  return p;
}

namespace {

Rational psi_partitions(int n, const PointConfig& cfg) {
  int total = cfg.size();
  int k = total - n;
  Rational prefactor = root_product(n, cfg);
  if (k == 0) return prefactor;
  if (prefactor == 0) return 0;
  std::vector<int> nonroots;
  for (int v = n; v < total; ++v) nonroots.push_back(v);
  std::vector<Rational> phi = ursell_all_subsets(cfg.restricted(nonroots));
  std::size_t full = std::size_t{1} << k;
  // g[B] = (product over root-block pairs of (1+f)) - 1.
  std::vector<Rational> link(full);
  link[0] = 1;
  for (std::size_t b = 1; b < full; ++b) {
    int top = std::countr_zero(static_cast<std::uint32_t>(b));
    Rational p = link[b & (b - 1)];
    for (int r = 0; r < n && p != 0; ++r) p *= 1 + cfg.f(r, n + top);
    link[b] = p;
  }
  std::vector<Rational> part(full);
  part[0] = 1;
  for (std::size_t m = 1; m < full; ++m) {
    std::size_t low = m & (~m + 1);
    std::size_t others = m & ~low;
    Rational acc = 0;
    for (std::size_t sub = others;; sub = (sub - 1) & others) {
      std::size_t block = sub | low;
      Rational g = link[block] - 1;
      if (g != 0 && phi[block] != 0 && part[m & ~block] != 0) acc += g * phi[block] * part[m & ~block];
      if (sub == 0) break;
    }
    part[m] = acc;
  }
  return prefactor * part[full - 1];
}

Rational psi_recursive(std::vector<int>& roots, std::vector<int>& nonroots, const PointConfig& cfg,
                       const SelectionRule& rule) {
  if (roots.empty()) return nonroots.empty() ? Rational(1) : Rational(0);
  std::size_t s = rule.select(roots);
  int xs = roots[s];
  std::vector<int> rest;
  rest.reserve(roots.size() - 1 + nonroots.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (i != s) rest.push_back(roots[i]);
  Rational prefactor = 1;
  for (int r : rest) prefactor *= 1 + cfg.f(xs, r);
  if (prefactor == 0) return 0;
  std::size_t m = nonroots.size();
  std::vector<int> candidates;
  for (std::size_t i = 0; i < m; ++i)
    if (cfg.f(xs, nonroots[i]) != 0) candidates.push_back(static_cast<int>(i));
  Rational sum = 0;
  std::size_t qmax = std::size_t{1} << candidates.size();
  for (std::size_t q = 0; q < qmax; ++q) {
    Rational w = 1;
    std::vector<int> next_roots = rest;
    std::vector<int> next_nonroots;
    std::uint32_t chosen = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if ((q >> c) & 1u) {
        int idx = candidates[c];
        chosen |= 1u << idx;
        w *= cfg.f(xs, nonroots[static_cast<std::size_t>(idx)]);
        next_roots.push_back(nonroots[static_cast<std::size_t>(idx)]);
      }
    for (std::size_t i = 0; i < m; ++i)
      if (!((chosen >> i) & 1u)) next_nonroots.push_back(nonroots[i]);
    sum += w * psi_recursive(next_roots, next_nonroots, cfg, rule);
  }
  return prefactor * sum;
}

}  // namespace

Rational psi(int n, const PointConfig& cfg, PsiMethod method, const SelectionRule& rule) {
  int total = cfg.size();
  if (n < 1 || n > total) throw ContractError("root count n must satisfy 1 <= n <= config size");
  switch (method) {
    case PsiMethod::brute:
      require_size("psi brute force", total, kMaxBruteVertices);
      return brute_sum(
          cfg, [n, total](const std::vector<std::uint32_t>& a) { return root_connected_adj(a, total, n); },
          [](int, int) { return false; });
    case PsiMethod::partitions:
      require_size("psi partitions", total, kMaxPartitionVertices);
      return psi_partitions(n, cfg);
    case PsiMethod::recursion: {
      require_size("psi recursion", total, kMaxRecursionVertices);
      std::vector<int> roots, nonroots;
      for (int v = 0; v < n; ++v) roots.push_back(v);
      for (int v = n; v < total; ++v) nonroots.push_back(v);
      return psi_recursive(roots, nonroots, cfg, rule);
    }
  }
  throw ContractError("unknown psi method");
}

Rational psi_reduced(int n, const PointConfig& cfg) {
  int total = cfg.size();
  if (n < 1 || n > total) throw ContractError("root count n must satisfy 1 <= n <= config size");
  require_size("psi_reduced brute force", total, kMaxBruteVertices);
  return brute_sum(
      cfg, [n, total](const std::vector<std::uint32_t>& a) { return root_connected_adj(a, total, n); },
      [n](int i, int j) { return i < n && j < n; });
}

RootedForest::RootedForest(int roots, std::vector<int> parent) : roots_(roots), parent_(std::move(parent)) {
  int v = static_cast<int>(parent_.size());
  if (roots < 1 || roots > v) throw ContractError("forest needs 1 <= roots <= vertices");
  depth_.assign(parent_.size(), 0);
  for (int r = 0; r < roots; ++r) {
    if (parent_[static_cast<std::size_t>(r)] != -1) throw ContractError("roots must have no parent");
    depth_[static_cast<std::size_t>(r)] = 1;
  }
  for (int u = roots; u < v; ++u) {
    int p = parent_[static_cast<std::size_t>(u)];
    if (p < 0 || p >= v || p == u) throw ContractError("non-root vertex needs a parent among the vertices");
  }
  for (int u = roots; u < v; ++u) {
    std::vector<int> chain;
    int w = u;
    while (depth_[static_cast<std::size_t>(w)] == 0) {
      chain.push_back(w);
      if (static_cast<int>(chain.size()) > v) throw ContractError("parent map contains a cycle");
      w = parent_[static_cast<std::size_t>(w)];
    }
    int d = depth_[static_cast<std::size_t>(w)];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth_[static_cast<std::size_t>(*it)] = ++d;
  }
}

GraphOnN RootedForest::graph() const {
  GraphOnN g(vertices(), roots_);
  for (int u = roots_; u < vertices(); ++u) g.add_edge(u, parent(u));
  return g;
}

GraphOnN RootedForest::maximal_graph() const {
  GraphOnN g(vertices(), roots_);
  int n = vertices();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      if (depth(i) == depth(j)) {
        g.add_edge(i, j);
      } else if (depth(j) == depth(i) + 1 && i >= parent(j)) {
        g.add_edge(i, j);
      }
    }
  return g;
}

RootedForest penrose_forest(const GraphOnN& g) {
  int n = g.vertices();
  int roots = g.roots();
  if (roots < 1 || !g.is_root_connected()) throw ContractError("penrose_forest needs a root-connected graph");
  // The ghost vertex sits above all roots, so BFS levels start with the roots at depth 1.
  std::vector<int> level(static_cast<std::size_t>(n), 0);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<int> frontier;
  for (int r = 0; r < roots; ++r) {
    level[static_cast<std::size_t>(r)] = 1;
    frontier.push_back(r);
  }
  auto adj = g.adjacency();
  int depth = 1;
  while (!frontier.empty()) {
    std::vector<int> next;
    std::uint32_t upper = 0;
    for (int v : frontier) upper |= 1u << v;
    for (int u = 0; u < n; ++u) {
      if (level[static_cast<std::size_t>(u)] != 0) continue;
      std::uint32_t up = adj[static_cast<std::size_t>(u)] & upper;
      if (up == 0) continue;
      parent[static_cast<std::size_t>(u)] = std::countr_zero(up);
      next.push_back(u);
    }
    ++depth;
    for (int u : next) level[static_cast<std::size_t>(u)] = depth;
    frontier = std::move(next);
  }
  return RootedForest(roots, std::move(parent));
}

void enumerate_forests(int roots, int vertices, const std::function<void(const RootedForest&)>& visit) {
  require_size("forest enumeration", vertices, kMaxBruteVertices);
  if (roots < 1 || roots > vertices) throw ContractError("forest needs 1 <= roots <= vertices");
  int k = vertices - roots;
  std::vector<int> parent(static_cast<std::size_t>(vertices), -1);
  std::vector<int> choice(static_cast<std::size_t>(k), 0);
  auto acyclic = [&]() {
    for (int u = roots; u < vertices; ++u) {
      int w = u;
      int steps = 0;
      while (w >= roots) {
        w = parent[static_cast<std::size_t>(w)];
        if (++steps > vertices) return false;
      }
    }
    return true;
  };
  std::function<void(int)> rec = [&](int idx) {
    if (idx == k) {
      if (!acyclic()) return;
      RootedForest f(roots, parent);
      if (f.graph().edge_count() != k) throw ContractError("forest edge count differs from k");
      visit(f);
      return;
    }
    int u = roots + idx;
    for (int p = 0; p < vertices; ++p) {
      if (p == u) continue;
      parent[static_cast<std::size_t>(u)] = p;
      rec(idx + 1);
    }
    parent[static_cast<std::size_t>(u)] = -1;
  };
  rec(0);
}

IdentitySides verify_forest_graph_equality(int n, int k, const PointConfig& cfg) {
  if (n < 1 || k < 0) throw ContractError("need n >= 1 and k >= 0");
  if (cfg.size() != n + k) throw ContractError("config size must equal n + k");
  require_size("forest-graph identity", n + k, kMaxIdentityVertices);
  Rational forest_side = 0;
  enumerate_forests(n, n + k, [&](const RootedForest& f) {
    GraphOnN tree = f.graph();
    GraphOnN top = f.maximal_graph();
    Rational term = 1;
    for (auto [i, j] : tree.edges()) term *= cfg.f(i, j);
    if (term == 0) return;
    for (auto [i, j] : top.edges())
      if (!tree.has_edge(i, j)) term *= 1 + cfg.f(i, j);
    forest_side += term;
  });
  Rational graph_side = psi(n, cfg, PsiMethod::brute);
  return {forest_side == graph_side, forest_side, graph_side};
}

PartitionSchemeReport verify_partition_scheme(int n, int k) {
  int v = n + k;
  require_size("partition scheme check", v, kMaxIdentityVertices);
  PartitionSchemeReport rep{true, 0, 0, ""};
  std::uint64_t interval_total = 0;
  enumerate_forests(n, v, [&](const RootedForest& f) {
    ++rep.forests;
    if (!rep.ok) return;
    if (penrose_forest(f.graph()) != f) {
      rep.ok = false;
      rep.detail = "a forest is not fixed by the scheme";
      return;
    }
    std::uint64_t lo = f.graph().edge_mask();
    std::uint64_t hi = f.maximal_graph().edge_mask();
    if ((lo & ~hi) != 0) {
      rep.ok = false;
      rep.detail = "forest not contained in its maximal graph";
      return;
    }
    std::uint64_t free = hi & ~lo;
    interval_total += std::uint64_t{1} << std::popcount(free);
    // Every graph of the interval must map back to f.
    for (std::uint64_t sub = free;; sub = (sub - 1) & free) {
      GraphOnN g(v, n, lo | sub);
      if (!(penrose_forest(g) == f)) {
        rep.ok = false;
        rep.detail = "interval graph maps to a different forest";
        return;
      }
      if (sub == 0) break;
    }
  });
  if (!rep.ok) return rep;
  enumerate_graphs(v, n, GraphClass::root_connected, [&](const GraphOnN& g) {
    ++rep.graphs;
    if (!rep.ok) return;
    RootedForest f = penrose_forest(g);
    std::uint64_t lo = f.graph().edge_mask();
    std::uint64_t hi = f.maximal_graph().edge_mask();
    if ((lo & ~g.edge_mask()) != 0 || (g.edge_mask() & ~hi) != 0) {
      rep.ok = false;
      rep.detail = "graph outside the interval of its forest";
    }
  });
  if (rep.ok && interval_total != rep.graphs) {
    rep.ok = false;
    rep.detail = "interval sizes sum to " + std::to_string(interval_total) + " but there are " +
                 std::to_string(rep.graphs) + " root-connected graphs";
  }
  return rep;
}

bool alternating_sign_check(int n, int k, const PointConfig& cfg) {
  if (cfg.size() != n + k) throw ContractError("config size must equal n + k");
  if (!cfg.is_non_negative_potential())
    throw ContractError("alternating sign needs Mayer entries in [-1, 0] (non-negative potential)");
  require_size("alternating sign check", n + k, kMaxBruteVertices);
  Rational value = psi(n, cfg, PsiMethod::partitions);
  return (k % 2 == 0) ? value >= 0 : value <= 0;
}

}  // namespace kscluster::graphkit
