#pragma once

#include <functional>
#include <span>
#include <vector>

#include "combprec/decompose.hpp"
#include "combprec/graph.hpp"

namespace combprec {

/// Block preconditioner T = sum_l P_l^T (K_l K_l^T) P_l induced by a forest partition.
///
/// Only the projections Pi_l = grad_l^T (grad_l grad_l^T)^{-1} grad_l are ever needed.
/// Pi_l is the orthogonal projection onto the vectors with zero mean on every tree
/// of part l (and zero on vertices the part does not touch), so it is applied as
/// per-tree mean subtraction in O(|V|).
class ForestPreconditioner {
 public:
  explicit ForestPreconditioner(const EdgePartition& partition) : partition_(&partition) {}

  const EdgePartition& partition() const noexcept { return *partition_; }
  int n_parts() const noexcept { return partition_->n_parts(); }
  int n_vertices() const noexcept { return partition_->graph().n_vertices(); }

  void apply_Pi_l(int l, std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply_Pi_l(int l, std::span<const double> v) const;

  /// Pi = K^T T^{-1} K = sum_l Pi_l.
  void apply_Pi(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply_Pi(std::span<const double> v) const;

 private:
  const EdgePartition* partition_;
};

enum class EigenMode { Dense, Lanczos };

struct SpectralOptions {
  EigenMode mode = EigenMode::Dense;
  double tol = 1e-10;       // Lanczos residual tolerance relative to lambda_max
  int max_krylov = 500;
  int dense_limit = 4096;   // largest |V| accepted in dense mode
};

/// kappa = sqrt(lambda_max / lambda_min_pos) of a positive semidefinite operator.
/// Eigenvalues below 1e-9 * lambda_max count as zero.
struct ConditionReport {
  double kappa = 1.0;
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;
};

/// Spectrum of Pi, i.e. kappa(T^{-1/2} K) = sqrt(lambda_max(Pi) / lambda_min>0(Pi)).
ConditionReport condition_number_preconditioned(const ForestPreconditioner& pc, SpectralOptions opts = {});

/// Spectrum of K^T K. `lambda_*` are eigenvalues of K^T K; sigma = sqrt(lambda).
ConditionReport condition_number_unpreconditioned(const WeightedGraph& g, SpectralOptions opts = {});

/// Extreme nonzero eigenvalues of a symmetric operator whose kernel is spanned by
/// the component indicators of `g`, via Lanczos with full reorthogonalization.
/// Throws ConvergenceError with the achieved residual when the Krylov cap is hit.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;
ConditionReport lanczos_condition(const WeightedGraph& g, const LinearOperator& op, const SpectralOptions& opts);

/// Pock-Chambolle diagonal preconditioners in inverse-step form:
/// primal[i] = sum_e |K_{e,i}|^{2-alpha}, dual[e] = sum_i |K_{e,i}|^alpha.
/// Zero primal entries (isolated vertices) are clamped to 1.
struct DiagonalPreconditioners {
  std::vector<double> primal;  // S, per vertex
  std::vector<double> dual;    // T, per edge
};
DiagonalPreconditioners diagonal_preconditioners(const WeightedGraph& g, double alpha = 1.0);

/// Dense checks of the two-part hypotheses that bound or pin kappa(T^{-1/2} K).
struct HypothesesReport {
  int rank_total = 0;             // rank grad^T
  int rank_part[2] = {0, 0};      // rank grad_l^T
  bool ranges_intersect = false;  // ran grad_1^T and ran grad_2^T share a nonzero vector
  bool rank_exceeds_min = false;  // rank grad^T > min(rank_1, rank_2)
  bool lower_bound_applies = false;  // both conditions above: kappa >= sqrt(2)
  double commutator_norm = 0.0;   // Frobenius norm of Pi_1 Pi_2 - Pi_2 Pi_1
  bool commute = false;           // commutator_norm <= 1e-10
  bool kernel_condition = false;  // ker(Pi_1 Pi_2) \ ker(Pi) nonempty
  bool optimal_applies = false;   // commute, kernel and range conditions: kappa == sqrt(2)
};

/// Requires a two-part partition and |V| <= dense_limit.
HypothesesReport check_theorem_hypotheses(const ForestPreconditioner& pc, int dense_limit = 4096);

}  // namespace combprec
