#include "combprec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "combprec/errors.hpp"

namespace combprec {

namespace {

void require_length(std::span<const double> v, int expected, const char* what) {
  if (v.size() != static_cast<std::size_t>(expected)) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace

WeightedGraph::WeightedGraph(int n_vertices, std::vector<Edge> edges, std::vector<double> weights)
    : n_vertices_(n_vertices), edges_(std::move(edges)), weights_(std::move(weights)) {
  if (n_vertices_ < 0) throw std::invalid_argument("negative vertex count");
  if (weights_.size() != edges_.size()) {
    throw std::invalid_argument("weight count " + std::to_string(weights_.size()) +
                                " does not match edge count " + std::to_string(edges_.size()));
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    if (i < 0 || j < 0 || i >= n_vertices_ || j >= n_vertices_) {
      throw std::invalid_argument("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (i == j) throw std::invalid_argument("edge " + std::to_string(e) + " is a self-loop");
    if (!(weights_[e] > 0.0) || !std::isfinite(weights_[e])) {
      throw std::invalid_argument("edge " + std::to_string(e) + " has a non-positive weight");
    }
  }

  offsets_.assign(static_cast<std::size_t>(n_vertices_) + 1, 0);
  for (const auto& [i, j] : edges_) {
    ++offsets_[static_cast<std::size_t>(i) + 1];
    ++offsets_[static_cast<std::size_t>(j) + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  incidence_.resize(edges_.size() * 2);
  std::vector<EdgeId> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < n_edges(); ++e) {
    const auto [i, j] = edges_[static_cast<std::size_t>(e)];
    incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(i)]++)] = e;
    incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(j)]++)] = e;
  }

  std::vector<std::pair<VertexId, VertexId>> keys;
  keys.reserve(edges_.size());
  for (const auto& [i, j] : edges_) keys.emplace_back(std::min(i, j), std::max(i, j));
  std::sort(keys.begin(), keys.end());
  has_parallel_ = std::adjacent_find(keys.begin(), keys.end()) != keys.end();
}

WeightedGraph::WeightedGraph(int n_vertices, std::vector<Edge> edges)
    : WeightedGraph(n_vertices, edges, std::vector<double>(edges.size(), 1.0)) {}

WeightedGraph WeightedGraph::subgraph(std::span<const EdgeId> edge_ids) const {
  std::vector<Edge> sub_edges;
  std::vector<double> sub_weights;
  sub_edges.reserve(edge_ids.size());
  sub_weights.reserve(edge_ids.size());
  for (EdgeId e : edge_ids) {
    sub_edges.push_back(edge(e));
    sub_weights.push_back(weight(e));
  }
  return WeightedGraph(n_vertices_, std::move(sub_edges), std::move(sub_weights));
}

WeightedGraph WeightedGraph::with_flipped_edge(EdgeId e) const {
  auto flipped = edges_;
  std::swap(flipped.at(static_cast<std::size_t>(e)).tail, flipped.at(static_cast<std::size_t>(e)).head);
  return WeightedGraph(n_vertices_, std::move(flipped), weights_);
}

UnionFind::UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
  auto idx = static_cast<std::size_t>(x);
  while (parent_[idx] != static_cast<int>(idx)) {
    parent_[idx] = parent_[static_cast<std::size_t>(parent_[idx])];
    idx = static_cast<std::size_t>(parent_[idx]);
  }
  return static_cast<int>(idx);
}

bool UnionFind::unite(int x, int y) {
  int rx = find(x);
  int ry = find(y);
  if (rx == ry) return false;
  if (size_[static_cast<std::size_t>(rx)] < size_[static_cast<std::size_t>(ry)]) std::swap(rx, ry);
  parent_[static_cast<std::size_t>(ry)] = rx;
  size_[static_cast<std::size_t>(rx)] += size_[static_cast<std::size_t>(ry)];
  return true;
}

std::vector<double> grad(const WeightedGraph& g, std::span<const double> u) {
  require_length(u, g.n_vertices(), "grad");
  std::vector<double> out(static_cast<std::size_t>(g.n_edges()));
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[e] = u[static_cast<std::size_t>(edges[e].tail)] - u[static_cast<std::size_t>(edges[e].head)];
  }
  return out;
}

void apply_K(const WeightedGraph& g, std::span<const double> u, std::span<double> out) {
  require_length(u, g.n_vertices(), "apply_K");
  require_length(out, g.n_edges(), "apply_K output");
  const auto edges = g.edges();
  const auto w = g.weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[e] = w[e] * (u[static_cast<std::size_t>(edges[e].tail)] - u[static_cast<std::size_t>(edges[e].head)]);
  }
}

std::vector<double> apply_K(const WeightedGraph& g, std::span<const double> u) {
  std::vector<double> out(static_cast<std::size_t>(g.n_edges()));
  apply_K(g, u, out);
  return out;
}

void apply_Kt(const WeightedGraph& g, std::span<const double> p, std::span<double> out) {
  require_length(p, g.n_edges(), "apply_Kt");
  require_length(out, g.n_vertices(), "apply_Kt output");
  std::fill(out.begin(), out.end(), 0.0);
  const auto edges = g.edges();
  const auto w = g.weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double wp = w[e] * p[e];
    out[static_cast<std::size_t>(edges[e].tail)] += wp;
    out[static_cast<std::size_t>(edges[e].head)] -= wp;
  }
}

std::vector<double> apply_Kt(const WeightedGraph& g, std::span<const double> p) {
  std::vector<double> out(static_cast<std::size_t>(g.n_vertices()));
  apply_Kt(g, p, out);
  return out;
}

std::vector<VertexId> connected_components(const WeightedGraph& g) {
  UnionFind uf(g.n_vertices());
  for (const auto& [i, j] : g.edges()) uf.unite(i, j);
  // Smallest id per root: the first vertex seen for each root in ascending order.
  std::vector<VertexId> root_label(static_cast<std::size_t>(g.n_vertices()), -1);
  std::vector<VertexId> labels(static_cast<std::size_t>(g.n_vertices()));
  for (VertexId v = 0; v < g.n_vertices(); ++v) {
    auto& lbl = root_label[static_cast<std::size_t>(uf.find(v))];
    if (lbl < 0) lbl = v;
    labels[static_cast<std::size_t>(v)] = lbl;
  }
  return labels;
}

int count_components(const WeightedGraph& g) {
  UnionFind uf(g.n_vertices());
  int components = g.n_vertices();
  for (const auto& [i, j] : g.edges()) {
    if (uf.unite(i, j)) --components;
  }
  return components;
}

int incidence_rank(const WeightedGraph& g) { return g.n_vertices() - count_components(g); }

bool is_forest(const WeightedGraph& g) {
  return g.n_edges() == g.n_vertices() - count_components(g);
}

bool is_linear_forest(const WeightedGraph& g) {
  if (!is_forest(g)) return false;
  for (VertexId v = 0; v < g.n_vertices(); ++v) {
    if (g.degree(v) > 2) return false;
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double sigma_max(const WeightedGraph& g, PowerIterationOptions opts) {
  if (g.n_edges() < 1) throw std::invalid_argument("sigma_max: graph has no edges");
  const auto n = static_cast<std::size_t>(g.n_vertices());
  // Fixed pseudo-random start: structured starts can be orthogonal to the top singular vector.
  std::mt19937_64 engine(0x5eed);
  std::vector<double> x(n);
  for (auto& xi : x) xi = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
  std::vector<double> Kx(static_cast<std::size_t>(g.n_edges()));
  std::vector<double> y(n);

  double nx = norm2(x);
  for (auto& xi : x) xi /= nx;
  double lambda = 0.0;
  double change = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    apply_K(g, x, Kx);
    apply_Kt(g, Kx, y);
    const double next = dot(x, y);  // Rayleigh quotient of K^T K at unit x
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    change = std::abs(next - lambda);
    lambda = next;
    if (it > 0 && change <= opts.tol * lambda) return std::sqrt(lambda);
  }
  throw ConvergenceError("sigma_max: power iteration did not converge", std::sqrt(lambda),
                         change / std::max(lambda, 1e-300));
}

}  // namespace combprec
