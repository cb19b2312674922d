#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace combprec {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

/// Oriented edge e = (tail, head); the gradient reads u[tail] - u[head].
struct Edge {
  VertexId tail;
  VertexId head;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph with a fixed edge orientation.
///
/// Immutable after construction. Incidence lists are stored CSR-style so that
/// the gradient, its adjoint and tree traversals are matrix-free.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Throws std::invalid_argument on out-of-range endpoints, self-loops,
  /// non-positive weights or a weight/edge count mismatch.
  WeightedGraph(int n_vertices, std::vector<Edge> edges, std::vector<double> weights);

  /// Unit weights.
  WeightedGraph(int n_vertices, std::vector<Edge> edges);

  int n_vertices() const noexcept { return n_vertices_; }
  int n_edges() const noexcept { return static_cast<int>(edges_.size()); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  double weight(EdgeId e) const { return weights_[static_cast<std::size_t>(e)]; }

  /// Edge ids incident to `v`, in ascending edge order.
  std::span<const EdgeId> incident(VertexId v) const noexcept {
    auto begin = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)]);
    auto end = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v) + 1]);
    return std::span<const EdgeId>(incidence_).subspan(begin, end - begin);
  }
  int degree(VertexId v) const noexcept { return static_cast<int>(incident(v).size()); }

  /// True when some unordered vertex pair carries more than one edge.
  bool has_parallel_edges() const noexcept { return has_parallel_; }

  /// The same vertex set restricted to the listed edges (ids renumbered 0..k-1).
  WeightedGraph subgraph(std::span<const EdgeId> edge_ids) const;

  /// Copy with the orientation of edge `e` reversed.
  WeightedGraph with_flipped_edge(EdgeId e) const;

 private:
  int n_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<EdgeId> offsets_;
  std::vector<EdgeId> incidence_;
  bool has_parallel_ = false;
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n);

  int find(int x);
  /// Returns false when x and y were already joined.
  bool unite(int x, int y);
  bool connected(int x, int y) { return find(x) == find(y); }
  int size_of(int x) { return size_[static_cast<std::size_t>(find(x))]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// (grad u)_e = u[tail] - u[head].
std::vector<double> grad(const WeightedGraph& g, std::span<const double> u);

/// K u = diag(w) grad u.
std::vector<double> apply_K(const WeightedGraph& g, std::span<const double> u);
void apply_K(const WeightedGraph& g, std::span<const double> u, std::span<double> out);

/// K^T p, the exact adjoint of apply_K.
std::vector<double> apply_Kt(const WeightedGraph& g, std::span<const double> p);
void apply_Kt(const WeightedGraph& g, std::span<const double> p, std::span<double> out);

/// Component labels; each label is the smallest vertex id in its component.
std::vector<VertexId> connected_components(const WeightedGraph& g);
int count_components(const WeightedGraph& g);

/// |V| - #components, which is rank(grad^T).
int incidence_rank(const WeightedGraph& g);

bool is_forest(const WeightedGraph& g);
/// A forest whose maximum degree is at most two, i.e. a disjoint union of paths.
bool is_linear_forest(const WeightedGraph& g);

struct PowerIterationOptions {
  double tol = 1e-9;
  int max_iters = 10000;
};

/// Largest singular value of K by power iteration on K^T K.
/// Throws ConvergenceError (carrying the best estimate) when max_iters is hit.
double sigma_max(const WeightedGraph& g, PowerIterationOptions opts = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace combprec
