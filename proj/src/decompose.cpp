#include "combprec/decompose.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "combprec/errors.hpp"

namespace combprec {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

}  // namespace

RootedForest RootedForest::build(int n, std::span<const Edge> all_edges, std::span<const EdgeId> part_edges) {
  RootedForest f;
  f.edges.assign(part_edges.begin(), part_edges.end());
  std::sort(f.edges.begin(), f.edges.end());
  f.parent.assign(idx(n), -1);
  f.parent_edge.assign(idx(n), -1);
  f.component.resize(idx(n));
  std::iota(f.component.begin(), f.component.end(), 0);

  UnionFind uf(n);
  std::vector<int> offsets(idx(n) + 1, 0);
  for (EdgeId e : f.edges) {
    const auto [a, b] = all_edges[idx(e)];
    if (!uf.unite(a, b)) {
      throw std::invalid_argument("part is not a forest: edge " + std::to_string(e) + " closes a cycle");
    }
    ++offsets[idx(a) + 1];
    ++offsets[idx(b) + 1];
  }
  for (int v = 0; v < n; ++v) f.max_degree = std::max(f.max_degree, offsets[idx(v) + 1]);
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<EdgeId> adj(idx(offsets.back()));
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  for (EdgeId e : f.edges) {
    const auto [a, b] = all_edges[idx(e)];
    adj[idx(fill[idx(a)]++)] = e;
    adj[idx(fill[idx(b)]++)] = e;
  }

  std::vector<char> visited(idx(n), 0);
  f.tree_offsets.push_back(0);
  for (VertexId root = 0; root < n; ++root) {
    if (visited[idx(root)] || offsets[idx(root)] == offsets[idx(root) + 1]) continue;
    visited[idx(root)] = 1;
    const std::size_t begin = f.order.size();
    f.order.push_back(root);
    for (std::size_t head = begin; head < f.order.size(); ++head) {
      const VertexId v = f.order[head];
      f.component[idx(v)] = root;
      for (int k = offsets[idx(v)]; k < offsets[idx(v) + 1]; ++k) {
        const EdgeId e = adj[idx(k)];
        const auto [a, b] = all_edges[idx(e)];
        const VertexId w = (a == v) ? b : a;
        if (visited[idx(w)]) continue;
        visited[idx(w)] = 1;
        f.parent[idx(w)] = v;
        f.parent_edge[idx(w)] = e;
        f.order.push_back(w);
      }
    }
    f.tree_offsets.push_back(static_cast<int>(f.order.size()));
  }
  f.rank = static_cast<int>(f.edges.size());
  return f;
}

NestingReport verify_nested(std::span<const RootedForest> parts, std::span<const Edge> edges) {
  NestingReport report;
  const auto L = parts.size();
  if (L == 0) {
    report.nested = true;
    return report;
  }
  std::vector<char> contained(L, 1);  // contained[l]: range(l) is inside range(l-1)
  for (std::size_t l = 1; l < L; ++l) {
    const auto& prev = parts[l - 1];
    for (EdgeId e : parts[l].edges) {
      const auto [a, b] = edges[idx(e)];
      if (prev.component[idx(a)] != prev.component[idx(b)]) {
        contained[l] = 0;
        break;
      }
    }
  }
  report.nested = std::all_of(contained.begin() + 1, contained.end(), [](char c) { return c != 0; });
  report.l_hat = 1;
  while (idx(report.l_hat) < L && contained[idx(report.l_hat)] &&
         parts[idx(report.l_hat)].rank == parts[0].rank) {
    ++report.l_hat;
  }
  return report;
}

NestingReport verify_nested(const EdgePartition& partition) {
  return verify_nested(partition.parts(), partition.graph().edges());
}

EdgePartition::EdgePartition(const WeightedGraph& g, std::vector<int> assignment, std::string strategy)
    : graph_(&g), assignment_(std::move(assignment)), strategy_(std::move(strategy)) {
  if (assignment_.size() != idx(g.n_edges())) {
    throw std::invalid_argument("assignment length " + std::to_string(assignment_.size()) +
                                " does not match edge count " + std::to_string(g.n_edges()));
  }
  int L = 0;
  for (int a : assignment_) {
    if (a < 0) throw std::invalid_argument("negative part index in assignment");
    L = std::max(L, a + 1);
  }
  std::vector<std::vector<EdgeId>> members(idx(L));
  for (EdgeId e = 0; e < g.n_edges(); ++e) members[idx(assignment_[idx(e)])].push_back(e);
  for (int l = 0; l < L; ++l) {
    if (members[idx(l)].empty()) throw std::invalid_argument("part " + std::to_string(l) + " is empty");
  }

  std::vector<RootedForest> built;
  built.reserve(idx(L));
  for (int l = 0; l < L; ++l) built.push_back(RootedForest::build(g.n_vertices(), g.edges(), members[idx(l)]));

  std::vector<int> perm(idx(L));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return built[idx(a)].rank > built[idx(b)].rank; });
  std::vector<int> new_index(idx(L));
  parts_.reserve(idx(L));
  for (int k = 0; k < L; ++k) {
    new_index[idx(perm[idx(k)])] = k;
    parts_.push_back(std::move(built[idx(perm[idx(k)])]));
  }
  for (auto& a : assignment_) a = new_index[idx(a)];
  nesting_ = verify_nested(parts_, g.edges());
}

EdgePartition grid_chains(const WeightedGraph& g, std::span<const int> dims) {
  if (dims.empty() || dims.size() > 3) throw std::invalid_argument("grid_chains: expected 1 to 3 dimensions");
  long long total = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("grid_chains: grid extents must be positive");
    total *= d;
  }
  if (total != g.n_vertices()) {
    throw std::invalid_argument("grid_chains: grid has " + std::to_string(total) + " vertices but graph has " +
                                std::to_string(g.n_vertices()));
  }
  std::vector<int> stride(dims.size(), 1);
  for (std::size_t a = 1; a < dims.size(); ++a) stride[a] = stride[a - 1] * dims[a - 1];
  std::vector<int> part_of_axis(dims.size(), -1);
  int L = 0;
  long long expected = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (dims[a] >= 2) part_of_axis[a] = L++;
    expected += static_cast<long long>(dims[a] - 1) * (total / dims[a]);
  }
  if (expected != g.n_edges()) {
    throw std::invalid_argument("grid_chains: grid has " + std::to_string(expected) + " edges but graph has " +
                                std::to_string(g.n_edges()));
  }

  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<int> assignment(idx(g.n_edges()));
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    int axis = -1;
    bool ok = true;
    for (std::size_t a = 0; a < dims.size() && ok; ++a) {
      const int ci = (i / stride[a]) % dims[a];
      const int cj = (j / stride[a]) % dims[a];
      if (ci == cj) continue;
      if (std::abs(ci - cj) != 1 || axis >= 0) ok = false;
      axis = static_cast<int>(a);
    }
    if (!ok || axis < 0 || !seen.emplace(std::min(i, j), std::max(i, j)).second) {
      throw std::invalid_argument("grid_chains: edge " + std::to_string(e) + " (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") is not an edge of the declared grid");
    }
    assignment[idx(e)] = part_of_axis[idx(axis)];
  }
  return EdgePartition(g, std::move(assignment), "chains");
}

EdgePartition greedy_nested_forests(const WeightedGraph& g) {
  // Each spanning forest is a depth-first forest of the residual graph. DFS trees are
  // long and thin, which leaves a sparser residual than a breadth-first or scan-order
  // forest (on K4 the residual of a DFS path is again a spanning path).
  const int n = g.n_vertices();
  std::vector<int> assignment(idx(g.n_edges()), -1);
  std::vector<EdgeId> residual(idx(g.n_edges()));
  std::iota(residual.begin(), residual.end(), 0);
  std::vector<std::vector<EdgeId>> adj(idx(n));
  std::vector<char> visited(idx(n));
  std::vector<std::pair<VertexId, std::size_t>> stack;
  int part = 0;
  while (!residual.empty()) {
    for (auto& a : adj) a.clear();
    for (EdgeId e : residual) {
      adj[idx(g.edge(e).tail)].push_back(e);
      adj[idx(g.edge(e).head)].push_back(e);
    }
    std::fill(visited.begin(), visited.end(), 0);
    for (VertexId root = 0; root < n; ++root) {
      if (visited[idx(root)]) continue;
      visited[idx(root)] = 1;
      stack.assign(1, {root, 0});
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next == adj[idx(v)].size()) {
          stack.pop_back();
          continue;
        }
        const EdgeId e = adj[idx(v)][next++];
        const auto [a, b] = g.edge(e);
        const VertexId w = a == v ? b : a;
        if (visited[idx(w)]) continue;
        visited[idx(w)] = 1;
        assignment[idx(e)] = part;
        stack.push_back({w, 0});
      }
    }
    std::erase_if(residual, [&](EdgeId e) { return assignment[idx(e)] >= 0; });
    ++part;
  }
  return EdgePartition(g, std::move(assignment), "greedy-nested");
}

EdgePartition greedy_linear_forests(const WeightedGraph& g) {
  const int n = g.n_vertices();
  std::vector<int> assignment(idx(g.n_edges()), -1);
  std::vector<EdgeId> residual(idx(g.n_edges()));
  std::iota(residual.begin(), residual.end(), 0);
  int part = 0;
  std::vector<int> residual_degree(idx(n));
  std::vector<int> part_degree(idx(n));
  while (!residual.empty()) {
    std::fill(residual_degree.begin(), residual_degree.end(), 0);
    std::fill(part_degree.begin(), part_degree.end(), 0);
    for (EdgeId e : residual) {
      ++residual_degree[idx(g.edge(e).tail)];
      ++residual_degree[idx(g.edge(e).head)];
    }
    UnionFind uf(n);
    auto take = [&](EdgeId e) {
      const auto [a, b] = g.edge(e);
      assignment[idx(e)] = part;
      ++part_degree[idx(a)];
      ++part_degree[idx(b)];
    };
    // Spanning forest of the edges whose endpoints have residual degree <= 2.
    for (EdgeId e : residual) {
      const auto [a, b] = g.edge(e);
      if (residual_degree[idx(a)] <= 2 && residual_degree[idx(b)] <= 2 && uf.unite(a, b)) take(e);
    }
    // Augment with any residual edge that keeps the part a union of paths.
    for (EdgeId e : residual) {
      if (assignment[idx(e)] >= 0) continue;
      const auto [a, b] = g.edge(e);
      if (part_degree[idx(a)] < 2 && part_degree[idx(b)] < 2 && uf.unite(a, b)) take(e);
    }
    std::erase_if(residual, [&](EdgeId e) { return assignment[idx(e)] >= 0; });
    ++part;
  }
  return EdgePartition(g, std::move(assignment), "greedy-linear");
}

namespace {

// Forest with lazily rebuilt rooted structure, used by the exchange-graph search.
class DynamicForest {
 public:
  explicit DynamicForest(int n) : adj_(idx(n)), root_(idx(n)), parent_(idx(n)), parent_edge_(idx(n)), depth_(idx(n)) {}

  void add(EdgeId e, const Edge& ed) {
    adj_[idx(ed.tail)].emplace_back(ed.head, e);
    adj_[idx(ed.head)].emplace_back(ed.tail, e);
    dirty_ = true;
  }

  void remove(EdgeId e, const Edge& ed) {
    auto drop = [e](auto& list) {
      std::erase_if(list, [e](const auto& entry) { return entry.second == e; });
    };
    drop(adj_[idx(ed.tail)]);
    drop(adj_[idx(ed.head)]);
    dirty_ = true;
  }

  bool connected(VertexId a, VertexId b) {
    refresh();
    return root_[idx(a)] == root_[idx(b)];
  }

  // Edges on the tree path between a and b, which must be connected.
  template <typename Visit>
  void walk_path(VertexId a, VertexId b, Visit&& visit) {
    refresh();
    while (a != b) {
      if (depth_[idx(a)] >= depth_[idx(b)]) {
        visit(parent_edge_[idx(a)]);
        a = parent_[idx(a)];
      } else {
        visit(parent_edge_[idx(b)]);
        b = parent_[idx(b)];
      }
    }
  }

 private:
  void refresh() {
    if (!dirty_) return;
    const int n = static_cast<int>(adj_.size());
    std::fill(root_.begin(), root_.end(), -1);
    queue_.clear();
    for (VertexId r = 0; r < n; ++r) {
      if (root_[idx(r)] >= 0) continue;
      root_[idx(r)] = r;
      parent_[idx(r)] = -1;
      parent_edge_[idx(r)] = -1;
      depth_[idx(r)] = 0;
      queue_.assign(1, r);
      for (std::size_t h = 0; h < queue_.size(); ++h) {
        const VertexId v = queue_[h];
        for (const auto& [w, e] : adj_[idx(v)]) {
          if (root_[idx(w)] >= 0) continue;
          root_[idx(w)] = r;
          parent_[idx(w)] = v;
          parent_edge_[idx(w)] = e;
          depth_[idx(w)] = depth_[idx(v)] + 1;
          queue_.push_back(w);
        }
      }
    }
    dirty_ = false;
  }

  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj_;
  std::vector<VertexId> root_;
  std::vector<VertexId> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<int> depth_;
  std::vector<VertexId> queue_;
  bool dirty_ = true;
};

}  // namespace

EdgePartition matroid_partition(const WeightedGraph& g, MatroidOptions opts) {
  if (g.n_edges() > opts.max_edges) {
    throw SizeLimitError("matroid_partition: " + std::to_string(g.n_edges()) + " edges exceed the cap of " +
                         std::to_string(opts.max_edges) +
                         "; use the greedy-nested or greedy-linear strategy for graphs of this size");
  }
  if (g.has_parallel_edges()) throw std::invalid_argument("matroid_partition: graph has parallel edges");

  const int n = g.n_vertices();
  const int m = g.n_edges();
  std::vector<int> part_of(idx(m), -1);
  std::vector<DynamicForest> forests;
  std::vector<EdgeId> pred(idx(m), -1);
  std::vector<int> seen(idx(m), -1);
  std::vector<EdgeId> queue;

  for (EdgeId e = 0; e < m; ++e) {
    queue.assign(1, e);
    seen[idx(e)] = e;
    EdgeId terminal = -1;
    int terminal_part = -1;
    const int L = static_cast<int>(forests.size());
    // Breadth-first search yields shortest augmenting paths, which keeps every part
    // independent after the swaps.
    for (std::size_t head = 0; head < queue.size() && terminal < 0; ++head) {
      const EdgeId x = queue[head];
      const auto [a, b] = g.edge(x);
      const int px = part_of[idx(x)];
      for (int l = 0; l < L; ++l) {
        if (l != px && !forests[idx(l)].connected(a, b)) {
          terminal = x;
          terminal_part = l;
          break;
        }
      }
      if (terminal >= 0) break;
      for (int l = 0; l < L; ++l) {
        if (l == px) continue;
        forests[idx(l)].walk_path(a, b, [&](EdgeId y) {
          if (seen[idx(y)] == e) return;
          seen[idx(y)] = e;
          pred[idx(y)] = x;
          queue.push_back(y);
        });
      }
    }

    if (terminal < 0) {
      forests.emplace_back(n);
      forests.back().add(e, g.edge(e));
      part_of[idx(e)] = L;
      continue;
    }
    EdgeId cur = terminal;
    int target = terminal_part;
    while (true) {
      const int old = part_of[idx(cur)];
      if (old >= 0) forests[idx(old)].remove(cur, g.edge(cur));
      forests[idx(target)].add(cur, g.edge(cur));
      part_of[idx(cur)] = target;
      if (cur == e) break;
      target = old;
      cur = pred[idx(cur)];
    }
  }

  if (opts.settle_nested) {
    const int L = static_cast<int>(forests.size());
    for (int l = 0; l < L; ++l) {
      UnionFind uf(n);
      for (EdgeId f = 0; f < m; ++f) {
        if (part_of[idx(f)] == l) uf.unite(g.edge(f).tail, g.edge(f).head);
      }
      for (EdgeId f = 0; f < m; ++f) {
        if (part_of[idx(f)] > l && uf.unite(g.edge(f).tail, g.edge(f).head)) part_of[idx(f)] = l;
      }
    }
    // A minimum partition cannot lose a part, but compact defensively.
    std::vector<int> used(idx(L), 0);
    for (int p : part_of) used[idx(p)] = 1;
    std::vector<int> remap(idx(L), -1);
    int next = 0;
    for (int l = 0; l < L; ++l) {
      if (used[idx(l)]) remap[idx(l)] = next++;
    }
    for (auto& p : part_of) p = remap[idx(p)];
  }
  return EdgePartition(g, std::move(part_of), "matroid");
}

int arboricity_oracle(const WeightedGraph& g) {
  const int n = g.n_vertices();
  if (n > 16) throw SizeLimitError("arboricity_oracle: at most 16 vertices are supported");
  int best = 0;
  const unsigned full = 1u << n;
  for (unsigned mask = 1; mask < full; ++mask) {
    const int k = __builtin_popcount(mask);
    if (k < 2) continue;
    int edges = 0;
    for (const auto& [a, b] : g.edges()) {
      if ((mask >> a & 1u) && (mask >> b & 1u)) ++edges;
    }
    best = std::max(best, (edges + k - 2) / (k - 1));
  }
  return best;
}

std::string partition_to_json(const EdgePartition& partition) {
  nlohmann::json doc;
  doc["L"] = partition.n_parts();
  doc["assignment"] = std::vector<int>(partition.assignment().begin(), partition.assignment().end());
  return doc.dump();
}

EdgePartition partition_from_json(const WeightedGraph& g, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("partition JSON: ") + err.what(), 0);
  }
  if (!doc.contains("L") || !doc.contains("assignment") || !doc["assignment"].is_array()) {
    throw ParseError("partition JSON: expected keys \"L\" and \"assignment\"", 0);
  }
  auto assignment = doc["assignment"].get<std::vector<int>>();
  const int L = doc["L"].get<int>();
  for (int a : assignment) {
    if (a < 0 || a >= L) throw ParseError("partition JSON: part index " + std::to_string(a) + " outside [0, L)", 0);
  }
  return EdgePartition(g, std::move(assignment), "imported");
}

}  // namespace combprec
