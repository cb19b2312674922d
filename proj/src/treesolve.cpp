#include "combprec/treesolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace combprec {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

}  // namespace

double clip(double x, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clip: empty interval");
  return std::max(lo, std::min(hi, x));
}

PwlDerivative::PwlDerivative(double slope, double intercept, std::pmr::memory_resource* mem)
    : breakpoints_(mem),
      left_slope_(slope),
      left_intercept_(intercept),
      right_slope_(slope),
      right_intercept_(intercept) {}

void PwlDerivative::reset(double slope, double intercept) {
  breakpoints_.clear();
  left_slope_ = right_slope_ = slope;
  left_intercept_ = right_intercept_ = intercept;
}

void PwlDerivative::add_ramp(double position, double delta) {
  breakpoints_[position] += delta;
  right_slope_ += delta;
  right_intercept_ -= delta * position;
}

void PwlDerivative::absorb(PwlDerivative& other) {
  if (other.breakpoints_.size() > breakpoints_.size() &&
      other.breakpoints_.get_allocator() == breakpoints_.get_allocator()) {
    breakpoints_.swap(other.breakpoints_);
  }
  for (const auto& [x, d] : other.breakpoints_) breakpoints_[x] += d;
  other.breakpoints_.clear();
  left_slope_ += other.left_slope_;
  left_intercept_ += other.left_intercept_;
  right_slope_ += other.right_slope_;
  right_intercept_ += other.right_intercept_;
  other.left_slope_ = other.left_intercept_ = other.right_slope_ = other.right_intercept_ = 0.0;
}

double PwlDerivative::operator()(double u) const {
  double value = left_slope_ * u + left_intercept_;
  for (const auto& [x, d] : breakpoints_) {
    if (x >= u) break;
    value += d * (u - x);
  }
  return value;
}

double PwlDerivative::solve(double target) const {
  double a = left_slope_;
  double b = left_intercept_;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [x, d] : breakpoints_) {
    if (a * x + b >= target) {
      if (a > 0.0) return std::clamp((target - b) / a, prev, x);
      if (b == target && std::isfinite(prev)) return prev;
      throw std::domain_error("PwlDerivative::solve: level is not attained at a unique leftmost point");
    }
    a += d;
    b -= d * x;
    prev = x;
  }
  if (a > 0.0) return std::max((target - b) / a, prev);
  if (b == target && std::isfinite(prev)) return prev;
  throw std::domain_error("PwlDerivative::solve: level is never attained");
}

ClipInterval PwlDerivative::clip_symmetric(double w) {
  // Left end: drop breakpoints where m <= -w, the root of m = -w lies beyond them.
  double a = left_slope_;
  double b = left_intercept_;
  while (!breakpoints_.empty()) {
    const auto it = breakpoints_.begin();
    if (a * it->first + b > -w) break;
    a += it->second;
    b -= it->second * it->first;
    breakpoints_.erase(it);
  }
  if (!(a > 0.0)) throw std::domain_error("PwlDerivative::clip_symmetric: function is not strictly increasing");
  const double lo = (-w - b) / a;

  double ar = right_slope_;
  double br = right_intercept_;
  if (breakpoints_.empty()) {
    ar = a;
    br = b;
  }
  while (!breakpoints_.empty()) {
    const auto it = std::prev(breakpoints_.end());
    if (ar * it->first + br <= w) break;
    ar -= it->second;
    br += it->second * it->first;
    breakpoints_.erase(it);
  }
  if (breakpoints_.empty()) {
    ar = a;
    br = b;
  }
  if (!(ar > 0.0)) throw std::domain_error("PwlDerivative::clip_symmetric: function is not strictly increasing");
  const double hi = std::max(lo, (w - br) / ar);

  breakpoints_[lo] += a;
  auto& last = breakpoints_[hi];
  last -= ar;
  if (last == 0.0) breakpoints_.erase(hi);
  left_slope_ = right_slope_ = 0.0;
  left_intercept_ = -w;
  right_intercept_ = w;
  return {lo, hi};
}

struct TreeSolverAccess {
  static void prepare(TreeWorkspace& ws, int n) {
    while (ws.messages_.size() < idx(n)) ws.messages_.emplace_back(0.0, 0.0, &ws.pool_);
    if (ws.intervals_.size() < idx(n)) ws.intervals_.resize(idx(n));
    if (ws.scratch_.size() < idx(n)) ws.scratch_.resize(idx(n));
    if (ws.residual_.size() < idx(n)) ws.residual_.resize(idx(n));
    if (ws.solution_.size() < idx(n)) ws.solution_.resize(idx(n));
  }
  static std::vector<PwlDerivative>& messages(TreeWorkspace& ws) { return ws.messages_; }
  static std::vector<ClipInterval>& intervals(TreeWorkspace& ws) { return ws.intervals_; }
  static std::vector<double>& scratch(TreeWorkspace& ws) { return ws.scratch_; }
  static std::vector<double>& residual(TreeWorkspace& ws) { return ws.residual_; }
  static std::vector<double>& solution(TreeWorkspace& ws) { return ws.solution_; }

  // Solves every tree of `part`; vertices outside the trees are left untouched.
  static void solve_trees(const RootedForest& part, std::span<const double> weights, std::span<const double> f,
                          std::span<double> v, TreeWorkspace& ws) {
    auto& msg = ws.messages_;
    auto& interval = ws.intervals_;
    for (int t = 0; t < part.n_trees(); ++t) {
      const auto tree = part.tree(t);
      for (VertexId a : tree) msg[idx(a)].reset(1.0, -f[idx(a)]);
      // Leaves to root: clip each subtree message and hand it to the parent.
      for (std::size_t k = tree.size() - 1; k >= 1; --k) {
        const VertexId a = tree[k];
        const double w = weights[idx(part.parent_edge[idx(a)])];
        interval[idx(a)] = msg[idx(a)].clip_symmetric(w);
        msg[idx(part.parent[idx(a)])].absorb(msg[idx(a)]);
      }
      const VertexId root = tree[0];
      v[idx(root)] = msg[idx(root)].solve(0.0);
      msg[idx(root)].reset(0.0, 0.0);
      // Root to leaves.
      for (std::size_t k = 1; k < tree.size(); ++k) {
        const VertexId a = tree[k];
        const auto [lo, hi] = interval[idx(a)];
        v[idx(a)] = std::max(lo, std::min(hi, v[idx(part.parent[idx(a)])]));
      }
    }
  }

  // Leaf peeling of K^T p = v - f on every tree.
  static void peel(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                   std::span<const double> v, std::span<const double> f, std::span<double> p, TreeWorkspace& ws) {
    auto& r = ws.residual_;
    for (int t = 0; t < part.n_trees(); ++t) {
      const auto tree = part.tree(t);
      double scale = 1.0;
      for (VertexId a : tree) {
        r[idx(a)] = v[idx(a)] - f[idx(a)];
        scale = std::max({scale, std::abs(v[idx(a)]), std::abs(f[idx(a)])});
      }
      for (std::size_t k = tree.size() - 1; k >= 1; --k) {
        const VertexId a = tree[k];
        const EdgeId e = part.parent_edge[idx(a)];
        const double raw = edges[idx(e)].tail == a ? r[idx(a)] : -r[idx(a)];
        const double w = weights[idx(e)];
        p[idx(e)] = w > 0.0 ? raw / w : 0.0;
        r[idx(part.parent[idx(a)])] += r[idx(a)];
      }
      const double root_residual = std::abs(r[idx(tree[0])]);
      if (root_residual > 1e-8 * scale * static_cast<double>(tree.size())) {
        throw std::runtime_error("recover_dual: root residual " + std::to_string(root_residual) +
                                 " exceeds tolerance; v is not the forest TV solution for f");
      }
    }
  }
};

void tv_on_forest(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                  std::span<const double> f, std::span<double> v, TreeWorkspace& ws) {
  const int n = static_cast<int>(part.parent.size());
  if (f.size() != idx(n) || v.size() != idx(n)) throw std::invalid_argument("tv_on_forest: vector length mismatch");
  if (weights.size() != edges.size()) throw std::invalid_argument("tv_on_forest: weight count mismatch");
  TreeSolverAccess::prepare(ws, n);
  std::copy(f.begin(), f.end(), v.begin());
  TreeSolverAccess::solve_trees(part, weights, f, v, ws);
}

std::vector<double> tv_on_forest(const RootedForest& part, std::span<const Edge> edges,
                                 std::span<const double> weights, std::span<const double> f) {
  TreeWorkspace ws;
  std::vector<double> v(f.size());
  tv_on_forest(part, edges, weights, f, v, ws);
  return v;
}

void recover_dual(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                  std::span<const double> v, std::span<const double> f, std::span<double> p, TreeWorkspace& ws) {
  const int n = static_cast<int>(part.parent.size());
  if (f.size() != idx(n) || v.size() != idx(n)) throw std::invalid_argument("recover_dual: vector length mismatch");
  if (p.size() != edges.size()) throw std::invalid_argument("recover_dual: dual length mismatch");
  TreeSolverAccess::prepare(ws, n);
  TreeSolverAccess::peel(part, edges, weights, v, f, p, ws);
}

void dual_block_update(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                       std::span<double> p, std::span<const double> ubar, double t, TreeWorkspace& ws) {
  if (!(t > 0.0)) throw std::invalid_argument("dual_block_update: t must be positive");
  const int n = static_cast<int>(part.parent.size());
  if (ubar.size() != idx(n) || p.size() != edges.size()) {
    throw std::invalid_argument("dual_block_update: vector length mismatch");
  }
  TreeSolverAccess::prepare(ws, n);
  auto& f = TreeSolverAccess::scratch(ws);
  // f_l = -K_l^T p_prev - ubar / t on the tree vertices.
  const double inv_t = 1.0 / t;
  for (VertexId a : part.order) f[idx(a)] = -ubar[idx(a)] * inv_t;
  for (VertexId a : part.order) {
    const EdgeId e = part.parent_edge[idx(a)];
    if (e < 0) continue;
    const double wp = weights[idx(e)] * p[idx(e)];
    f[idx(edges[idx(e)].tail)] -= wp;
    f[idx(edges[idx(e)].head)] += wp;
  }
  auto& sol = TreeSolverAccess::solution(ws);
  TreeSolverAccess::solve_trees(part, weights, f, sol, ws);
  TreeSolverAccess::peel(part, edges, weights, sol, f, p, ws);
}

}  // namespace combprec
