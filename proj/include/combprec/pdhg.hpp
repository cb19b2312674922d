#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "combprec/decompose.hpp"
#include "combprec/graph.hpp"

namespace combprec {

/// 1/2 ||u - f||^2 + ||K u||_1.
struct RofData {
  std::vector<double> f;
};

/// sum_i [ eps * sum_c u_ic log u_ic + <u_i, rho_i> ] + sum_c ||K u_c||_1 with every
/// u_i on the probability simplex. `rho` is channel-major: rho[c * n + i].
struct SimplexEntropyData {
  int classes = 2;
  std::vector<double> rho;
  double epsilon = 1.0;
};

struct Problem {
  const WeightedGraph* graph = nullptr;
  std::variant<RofData, SimplexEntropyData> data;

  int channels() const;
  /// Throws DimensionError / std::invalid_argument on inconsistent data.
  void validate() const;
};

Problem make_rof(const WeightedGraph& g, std::vector<double> f);
Problem make_simplex_entropy(const WeightedGraph& g, int classes, std::vector<double> rho, double epsilon);

enum class PrecondMode { None, Diagonal, Partition };

std::string to_string(PrecondMode mode);

struct Preconditioning {
  PrecondMode mode = PrecondMode::None;
  const EdgePartition* partition = nullptr;  // required for Partition
  double alpha = 1.0;                        // Diagonal only
};

struct PdhgOptions {
  double tol = 1e-10;   // on the relative primal-dual gap
  int max_iters = 100000;
  double gamma = 0.0;   // strong-convexity modulus for acceleration; 0 disables
  int gap_every = 10;
  bool strict = false;  // partition mode: s = t = sqrt(L) * (1 + 1e-6)
  std::optional<double> s;  // overrides of the initial inverse step sizes
  std::optional<double> t;
};

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double rel_gap = 0.0;
};

struct TraceRow {
  int iter = 0;
  double primal = 0.0;
  double dual = 0.0;
  double rel_gap = 0.0;
  double elapsed_s = 0.0;
};

struct PdhgStats {
  int iterations = 0;
  bool converged = false;
  GapReport gap;
  double s0 = 0.0;
  double t0 = 0.0;
  double setup_s = 0.0;  // step-size estimation and preconditioner preparation
  double solve_s = 0.0;
  std::vector<TraceRow> trace;
};

/// u and p are channel-major: u[c * |V| + i], p[c * |E| + e].
struct PdhgResult {
  std::vector<double> u;
  std::vector<double> p;
  PdhgStats stats;
};

/// Preconditioned PDHG, primal step first:
///   u+ = prox_{G, s}(u - K^T p / s),  ubar = u+ + theta (u+ - u),  p+ = dual step at ubar.
/// The dual step is an exact forest block solve per part and channel (Partition) or an
/// entrywise projection onto [-1, 1] (None, Diagonal). Stops once the relative gap is
/// at most tol; the gap is checked at iteration 1 and every gap_every iterations.
/// Throws DivergenceError on non-finite iterates and std::invalid_argument when the
/// step sizes violate s * t >= ||T^{-1/2} K S^{-1/2}||^2.
PdhgResult pdhg_solve(const Problem& problem, const Preconditioning& pre, const PdhgOptions& opts = {});

/// (f + s u_k - K^T p_k) / (1 + s).
std::vector<double> primal_update_rof(std::span<const double> u_k, std::span<const double> Ktp,
                                      std::span<const double> f, double s);

/// Per-vertex prox of the entropic simplex term at centre z = u_k - K^T p_k / s.
/// All vectors are channel-major with `classes` channels.
std::vector<double> primal_update_simplex_entropy(std::span<const double> u_k, std::span<const double> Ktp,
                                                  std::span<const double> rho, int classes, double epsilon,
                                                  double s);

/// argmin_{u in simplex} eps sum u log u + <u, rho> + s/2 ||u - z||^2 for one vertex.
/// Throws ConvergenceError after 100 outer Newton steps.
void simplex_entropy_prox(std::span<const double> z, std::span<const double> rho, double epsilon, double s,
                          std::span<double> out);

struct StepState {
  double s = 1.0;
  double t = 1.0;
  double theta = 1.0;
};

/// theta = 1 / sqrt(1 + 2 gamma / s), s <- s / theta, t <- t * theta. gamma = 0 leaves
/// the steps unchanged with theta = 1.
void accelerate_step(StepState& state, double gamma);

/// Primal and dual objectives at (u, p); p is clipped to [-1, 1] first.
GapReport primal_dual_gap(const Problem& problem, std::span<const double> u, std::span<const double> p);

struct CutResult {
  std::vector<EdgeId> edges;
  double value = 0.0;
  std::vector<bool> upper;  // u_i > level
};

/// Edges of g joining {u > level} to its complement, and their total weight.
CutResult threshold_cut(const WeightedGraph& g, std::span<const double> u, double level = 0.0);

/// CSV with header iter,primal,dual,rel_gap,elapsed_s.
void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);

}  // namespace combprec
