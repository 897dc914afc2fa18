#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kscluster/rational.hpp"

// Labelled graphs, Mayer weights, Ursell functions and the multi-rooted
// coefficients psi_{n,n+k}. Vertices are 0-based: 0..n-1 are roots.
namespace kscluster::graphkit {

inline constexpr int kMaxBruteVertices = 8;
inline constexpr int kMaxIdentityVertices = 7;
inline constexpr int kMaxRecurrenceVertices = 16;
inline constexpr int kMaxPartitionVertices = 16;
inline constexpr int kMaxRecursionVertices = 12;

class PointConfig {
 public:
  // Row-major square matrix; the diagonal is ignored.
  explicit PointConfig(std::vector<std::vector<Rational>> mayer);
  // f = -1 where `incompatible(i, j)` holds, 0 elsewhere.
  static PointConfig hard_core(int n, const std::function<bool(int, int)>& incompatible);

  int size() const { return n_; }
  const Rational& f(int i, int j) const { return m_[static_cast<std::size_t>(i * n_ + j)]; }
  bool is_hard_core() const;
  // All off-diagonal entries in [-1, 0].
  bool is_non_negative_potential() const;
  PointConfig restricted(std::span<const int> indices) const;
  std::vector<std::vector<Rational>> matrix() const;

 private:
  PointConfig() = default;
  int n_ = 0;
  std::vector<Rational> m_;
};

// Edge set over the pair slots, colex order: slot(i<j) = j(j-1)/2 + i.
class GraphOnN {
 public:
  static constexpr int kMaxVertices = 11;

  GraphOnN(int vertices, int roots, std::uint64_t edges = 0);

  static int pair_slot(int i, int j);
  int vertices() const { return vertices_; }
  int roots() const { return roots_; }
  std::uint64_t edge_mask() const { return edges_; }
  bool has_edge(int i, int j) const;
  void add_edge(int i, int j);
  int edge_count() const;
  std::vector<std::pair<int, int>> edges() const;
  std::vector<std::uint32_t> adjacency() const;

  bool is_connected() const;
  // Every vertex reaches a root through the edges.
  bool is_root_connected() const;

  bool operator==(const GraphOnN&) const = default;

 private:
  int vertices_;
  int roots_;
  std::uint64_t edges_;
};

enum class GraphClass { all, connected, root_connected };

// Calls `visit` once per graph of the class; `roots` only matters for root_connected.
void enumerate_graphs(int vertices, int roots, GraphClass cls, const std::function<void(const GraphOnN&)>& visit);
std::uint64_t count_graphs(int vertices, int roots, GraphClass cls);

Rational graph_weight(const GraphOnN& g, const PointConfig& cfg);

enum class UrsellMethod { brute, recurrence };
Rational ursell(const PointConfig& cfg, UrsellMethod method = UrsellMethod::recurrence);

// phi^T for every vertex subset (index = bitmask); entry 0 is unused and set to 0.
std::vector<Rational> ursell_all_subsets(const PointConfig& cfg);

// Signed Ursell function of a hard-core configuration given by adjacency
// bitmasks (bit j of adj[i] set iff i and j are incompatible). Up to 20 vertices.
std::int64_t ursell_hard_core(std::span<const std::uint32_t> adjacency);

class SelectionRule {
 public:
  using Fn = std::function<std::size_t(std::span<const int>)>;
  SelectionRule(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  static SelectionRule first();
  static SelectionRule last();
  // Position of the largest point label.
  static SelectionRule max_label();

  // 0-based position into a nonempty tuple; throws if the rule misbehaves.
  std::size_t select(std::span<const int> tuple) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

enum class PsiMethod { brute, partitions, recursion };

// psi_{n, size} with points 0..n-1 as roots.
Rational psi(int n, const PointConfig& cfg, PsiMethod method = PsiMethod::partitions,
             const SelectionRule& rule = SelectionRule::first());
Rational psi_reduced(int n, const PointConfig& cfg);
Rational root_product(int n, const PointConfig& cfg);

class RootedForest {
 public:
  // parent[v] = -1 for roots (v < roots); every other vertex must lead to a root.
  RootedForest(int roots, std::vector<int> parent);

  int vertices() const { return static_cast<int>(parent_.size()); }
  int roots() const { return roots_; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& parents() const { return parent_; }
  // Roots have depth 1, matching the ghost-rooted BFS levels.
  int depth(int v) const { return depth_[static_cast<std::size_t>(v)]; }
  GraphOnN graph() const;
  // Largest graph whose Penrose image is this forest.
  GraphOnN maximal_graph() const;

  bool operator==(const RootedForest& o) const { return roots_ == o.roots_ && parent_ == o.parent_; }

 private:
  int roots_;
  std::vector<int> parent_;
  std::vector<int> depth_;
};

RootedForest penrose_forest(const GraphOnN& g);
void enumerate_forests(int roots, int vertices, const std::function<void(const RootedForest&)>& visit);

struct IdentitySides {
  bool equal;
  Rational lhs;
  Rational rhs;
};

IdentitySides verify_forest_graph_equality(int n, int k, const PointConfig& cfg);

struct PartitionSchemeReport {
  bool ok;
  std::uint64_t graphs;
  std::uint64_t forests;
  std::string detail;
};
// Checks F subset G subset R(F) for every G and that the intervals cover D_{n,n+k} once.
PartitionSchemeReport verify_partition_scheme(int n, int k);

bool alternating_sign_check(int n, int k, const PointConfig& cfg);

}  // namespace kscluster::graphkit
