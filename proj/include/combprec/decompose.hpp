#pragma once

#include <span>
#include <string>
#include <vector>

#include "combprec/graph.hpp"

namespace combprec {

/// One part of an edge partition, stored as a rooted forest over the full vertex set.
///
/// Every tree is rooted at its smallest vertex id. `order` lists the vertices of
/// each tree with at least one edge in breadth-first order (root first); reading a
/// tree's slice backwards gives a leaf-to-root schedule. Vertices without an edge
/// in this part are not listed in `order`.
struct RootedForest {
  std::vector<EdgeId> edges;         // global edge ids, ascending
  std::vector<VertexId> order;       // tree vertices, tree by tree, BFS order
  std::vector<int> tree_offsets;     // tree t occupies order[tree_offsets[t], tree_offsets[t+1])
  std::vector<VertexId> parent;      // per vertex; -1 for roots and isolated vertices
  std::vector<EdgeId> parent_edge;   // per vertex; -1 for roots and isolated vertices
  std::vector<VertexId> component;   // per vertex; smallest vertex id of its tree (itself if isolated)
  int rank = 0;                      // |V| - #components = number of edges
  int max_degree = 0;

  int n_trees() const noexcept { return static_cast<int>(tree_offsets.size()) - 1; }
  std::span<const VertexId> tree(int t) const noexcept {
    auto b = static_cast<std::size_t>(tree_offsets[static_cast<std::size_t>(t)]);
    auto e = static_cast<std::size_t>(tree_offsets[static_cast<std::size_t>(t) + 1]);
    return std::span<const VertexId>(order).subspan(b, e - b);
  }
  bool is_linear() const noexcept { return max_degree <= 2; }

  /// Builds the rooted structure for the listed edges of `all_edges` on `n` vertices.
  /// Throws std::invalid_argument if the edges contain a cycle (including parallel edges).
  static RootedForest build(int n, std::span<const Edge> all_edges, std::span<const EdgeId> part_edges);
};

struct NestingReport {
  bool nested = false;
  int l_hat = 0;  // leading parts whose range equals that of part 0
};

/// Disjoint cover of the edges of a graph by forests.
///
/// Parts are ordered by nonincreasing rank, ties broken by the order in which the
/// strategy produced them. The partition keeps a pointer to its graph, which must
/// outlive it.
class EdgePartition {
 public:
  /// `assignment[e]` is the part index of edge e in production order; parts are then
  /// re-sorted by rank. Throws std::invalid_argument on a bad assignment or a non-forest part.
  EdgePartition(const WeightedGraph& g, std::vector<int> assignment, std::string strategy);
  // The partition keeps a reference to its graph, so temporaries are rejected.
  EdgePartition(WeightedGraph&&, std::vector<int>, std::string) = delete;

  const WeightedGraph& graph() const noexcept { return *graph_; }
  int n_parts() const noexcept { return static_cast<int>(parts_.size()); }
  const RootedForest& part(int l) const { return parts_.at(static_cast<std::size_t>(l)); }
  std::span<const RootedForest> parts() const noexcept { return parts_; }
  std::span<const int> assignment() const noexcept { return assignment_; }
  const std::string& strategy() const noexcept { return strategy_; }
  const NestingReport& nesting() const noexcept { return nesting_; }

 private:
  const WeightedGraph* graph_;
  std::vector<int> assignment_;
  std::vector<RootedForest> parts_;
  std::string strategy_;
  NestingReport nesting_;
};

/// Containment of consecutive part ranges, decided combinatorially: range(l+1) is in
/// range(l) iff every edge of part l+1 joins two vertices of the same tree of part l.
NestingReport verify_nested(std::span<const RootedForest> parts, std::span<const Edge> edges);
NestingReport verify_nested(const EdgePartition& partition);

/// Splits a grid graph into one linear forest per axis of extent >= 2.
///
/// `dims` lists the extents fastest axis first; vertex (x0, x1, x2) has id
/// x0 + dims[0] * (x1 + dims[1] * x2). Throws std::invalid_argument if `g` is not
/// exactly that grid.
EdgePartition grid_chains(const WeightedGraph& g, std::span<const int> dims);
EdgePartition grid_chains(WeightedGraph&&, std::span<const int>) = delete;

/// Repeatedly removes a spanning forest of the remaining edges.
EdgePartition greedy_nested_forests(const WeightedGraph& g);
EdgePartition greedy_nested_forests(WeightedGraph&&) = delete;

/// Like greedy_nested_forests, but every part is a linear forest.
EdgePartition greedy_linear_forests(const WeightedGraph& g);
EdgePartition greedy_linear_forests(WeightedGraph&&) = delete;

struct MatroidOptions {
  int max_edges = 5000;
  /// After the augmenting-path phase, move every edge into the lowest part it fits
  /// into. The part count is unchanged and the result is always nested.
  bool settle_nested = true;
};

/// Minimum number of forests (the arboricity) by augmenting paths in the exchange graph.
/// Throws SizeLimitError above `opts.max_edges` edges and std::invalid_argument on
/// parallel edges.
EdgePartition matroid_partition(const WeightedGraph& g, MatroidOptions opts = {});
EdgePartition matroid_partition(WeightedGraph&&, MatroidOptions = {}) = delete;

/// Nash-Williams arboricity by enumerating all vertex subsets. Requires |V| <= 16.
int arboricity_oracle(const WeightedGraph& g);

/// {"L": int, "assignment": [part index per edge]}
std::string partition_to_json(const EdgePartition& partition);
EdgePartition partition_from_json(const WeightedGraph& g, const std::string& text);
EdgePartition partition_from_json(WeightedGraph&&, const std::string&) = delete;

}  // namespace combprec
