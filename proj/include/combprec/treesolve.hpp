#pragma once

#include <cstddef>
#include <map>
#include <memory_resource>
#include <span>
#include <vector>

#include "combprec/decompose.hpp"
#include "combprec/graph.hpp"

namespace combprec {

/// max(lo, min(hi, x)). Throws std::invalid_argument when lo > hi.
double clip(double x, double lo, double hi);

/// Interval [lo, hi] on which a subtree follows its parent's value.
struct ClipInterval {
  double lo;
  double hi;
};

/// Nondecreasing continuous piecewise-linear function of one variable.
///
/// Stored as the affine piece left of all breakpoints plus slope increments at the
/// breakpoints; the rightmost affine piece is tracked as well so both ends can be
/// scanned. Breakpoints live in a map keyed by position, so coincident breakpoints
/// merge.
class PwlDerivative {
 public:
  using BreakpointMap = std::pmr::map<double, double>;

  explicit PwlDerivative(double slope = 0.0, double intercept = 0.0,
                         std::pmr::memory_resource* mem = std::pmr::get_default_resource());

  /// Resets to u -> slope * u + intercept with no breakpoints.
  void reset(double slope, double intercept);

  /// Adds delta * max(0, u - position).
  void add_ramp(double position, double delta);

  /// Pointwise sum; `other` is left empty. The smaller breakpoint set is inserted
  /// into the larger one.
  void absorb(PwlDerivative& other);

  double operator()(double u) const;

  /// Leftmost u with m(u) = target. Throws std::domain_error if target is never attained.
  double solve(double target) const;

  /// Replaces m by clip(m, -w, w) and returns the interval where -w <= m <= w.
  /// Requires m to be strictly increasing (slope > 0 on every piece) when w > 0.
  ClipInterval clip_symmetric(double w);

  std::size_t n_breakpoints() const noexcept { return breakpoints_.size(); }
  const BreakpointMap& breakpoints() const noexcept { return breakpoints_; }
  double left_slope() const noexcept { return left_slope_; }
  double left_intercept() const noexcept { return left_intercept_; }
  double right_slope() const noexcept { return right_slope_; }
  double right_intercept() const noexcept { return right_intercept_; }

 private:
  BreakpointMap breakpoints_;
  double left_slope_;
  double left_intercept_;
  double right_slope_;
  double right_intercept_;
};

/// Scratch memory for the forest solvers; reuse one per thread across calls.
class TreeWorkspace {
 public:
  TreeWorkspace() = default;
  TreeWorkspace(const TreeWorkspace&) = delete;
  TreeWorkspace& operator=(const TreeWorkspace&) = delete;

 private:
  friend struct TreeSolverAccess;
  std::pmr::unsynchronized_pool_resource pool_;
  std::vector<PwlDerivative> messages_;
  std::vector<ClipInterval> intervals_;
  std::vector<double> scratch_;
  std::vector<double> residual_;
  std::vector<double> solution_;
};

/// Exact minimizer of 1/2 ||v - f||^2 + sum_{e in part} w_e |(grad v)_e|.
///
/// Messages are passed from the leaves to each root, the root equation is solved,
/// and values are propagated back down by clipping. Entries of vertices outside the
/// part's trees are copied from f. `weights` is indexed by global edge id; zero
/// weights are accepted and decouple the edge.
void tv_on_forest(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                  std::span<const double> f, std::span<double> v, TreeWorkspace& ws);
std::vector<double> tv_on_forest(const RootedForest& part, std::span<const Edge> edges,
                                 std::span<const double> weights, std::span<const double> f);

/// Unique p on the part's edges with K_part^T p = v - f, returned in normalized
/// form (the raw edge value divided by its weight, so an optimal pair has |p| <= 1).
/// Only entries of `p` on the part's edges are written. Throws std::runtime_error
/// when the root equation leaves a residual above 1e-8 times the data scale.
void recover_dual(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                  std::span<const double> v, std::span<const double> f, std::span<double> p, TreeWorkspace& ws);

/// Exact dual step for one forest block:
///   p <- argmin_{|p|_inf <= 1} 1/2 || K_l^T p + f_l ||^2,  f_l = -K_l^T p_prev - ubar / t.
/// `p` holds p_prev on the part's edges on entry and the update on exit.
void dual_block_update(const RootedForest& part, std::span<const Edge> edges, std::span<const double> weights,
                       std::span<double> p, std::span<const double> ubar, double t, TreeWorkspace& ws);

}  // namespace combprec
