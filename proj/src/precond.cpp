#include "combprec/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "combprec/errors.hpp"

namespace combprec {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

constexpr double kZeroEigenvalue = 1e-9;

ConditionReport report_from_spectrum(const Eigen::VectorXd& eig) {
  ConditionReport r;
  if (eig.size() == 0) return r;
  r.lambda_max = eig.maxCoeff();
  if (r.lambda_max <= 0.0) return r;
  const double cutoff = kZeroEigenvalue * r.lambda_max;
  r.lambda_min_pos = r.lambda_max;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig[i] > cutoff) r.lambda_min_pos = std::min(r.lambda_min_pos, eig[i]);
  }
  r.kappa = std::sqrt(r.lambda_max / r.lambda_min_pos);
  return r;
}

Eigen::MatrixXd dense_projection(const ForestPreconditioner& pc, int l) {
  const int n = pc.n_vertices();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  const auto& part = pc.partition().part(l);
  for (int t = 0; t < part.n_trees(); ++t) {
    const auto tree = part.tree(t);
    const double inv = 1.0 / static_cast<double>(tree.size());
    for (VertexId a : tree) {
      for (VertexId b : tree) P(a, b) = (a == b ? 1.0 : 0.0) - inv;
    }
  }
  return P;
}

Eigen::MatrixXd dense_incidence_transpose(const WeightedGraph& g, std::span<const EdgeId> edges) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g.n_vertices(), static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = g.edge(edges[k]);
    D(a, static_cast<Eigen::Index>(k)) = 1.0;
    D(b, static_cast<Eigen::Index>(k)) = -1.0;
  }
  return D;
}

int numerical_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

void check_dense_size(int n, int limit) {
  if (n > limit) {
    throw SizeLimitError("dense eigensolve limited to " + std::to_string(limit) + " vertices, graph has " +
                         std::to_string(n) + "; use the Lanczos mode");
  }
}

}  // namespace

void ForestPreconditioner::apply_Pi_l(int l, std::span<const double> v, std::span<double> out) const {
  const int n = n_vertices();
  if (v.size() != idx(n) || out.size() != idx(n)) throw DimensionError("apply_Pi_l: vector length mismatch");
  const auto& part = partition_->part(l);
  std::fill(out.begin(), out.end(), 0.0);
  for (int t = 0; t < part.n_trees(); ++t) {
    const auto tree = part.tree(t);
    double sum = 0.0;
    for (VertexId a : tree) sum += v[idx(a)];
    const double mean = sum / static_cast<double>(tree.size());
    for (VertexId a : tree) out[idx(a)] = v[idx(a)] - mean;
  }
}

std::vector<double> ForestPreconditioner::apply_Pi_l(int l, std::span<const double> v) const {
  std::vector<double> out(idx(n_vertices()));
  apply_Pi_l(l, v, out);
  return out;
}

void ForestPreconditioner::apply_Pi(std::span<const double> v, std::span<double> out) const {
  const int n = n_vertices();
  if (v.size() != idx(n) || out.size() != idx(n)) throw DimensionError("apply_Pi: vector length mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (int l = 0; l < n_parts(); ++l) {
    const auto& part = partition_->part(l);
    for (int t = 0; t < part.n_trees(); ++t) {
      const auto tree = part.tree(t);
      double sum = 0.0;
      for (VertexId a : tree) sum += v[idx(a)];
      const double mean = sum / static_cast<double>(tree.size());
      for (VertexId a : tree) out[idx(a)] += v[idx(a)] - mean;
    }
  }
}

std::vector<double> ForestPreconditioner::apply_Pi(std::span<const double> v) const {
  std::vector<double> out(idx(n_vertices()));
  apply_Pi(v, out);
  return out;
}

ConditionReport lanczos_condition(const WeightedGraph& g, const LinearOperator& op, const SpectralOptions& opts) {
  const int n = g.n_vertices();
  const auto labels = connected_components(g);
  std::vector<double> comp_size(idx(n), 0.0);
  for (VertexId v : labels) comp_size[idx(v)] += 1.0;
  const int rank = incidence_rank(g);
  if (rank == 0) return {};

  std::vector<double> comp_sum(idx(n));
  auto deflate = [&](std::vector<double>& x) {
    std::fill(comp_sum.begin(), comp_sum.end(), 0.0);
    for (int i = 0; i < n; ++i) comp_sum[idx(labels[idx(i)])] += x[idx(i)];
    for (int i = 0; i < n; ++i) {
      const auto c = idx(labels[idx(i)]);
      x[idx(i)] -= comp_sum[c] / comp_size[c];
    }
  };

  std::vector<std::vector<double>> Q;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> q(idx(n));
  for (int i = 0; i < n; ++i) q[idx(i)] = 1.0 + static_cast<double>((i * 7919) % 101) / 101.0;
  deflate(q);
  double nq = norm2(q);
  for (auto& x : q) x /= nq;

  const int max_dim = std::min(opts.max_krylov, rank);
  std::vector<double> w(idx(n));
  ConditionReport best;
  double residual = 0.0;
  for (int j = 0; j < max_dim; ++j) {
    Q.push_back(q);
    op(Q.back(), w);
    deflate(w);
    const double a = dot(Q.back(), w);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : Q) {
        const double c = dot(qi, w);
        for (int i = 0; i < n; ++i) w[idx(i)] -= c * qi[idx(i)];
      }
    }
    const double b = norm2(w);

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub(std::max<Eigen::Index>(k - 1, 0));
    for (Eigen::Index i = 0; i + 1 < k; ++i) sub[i] = beta[idx(static_cast<int>(i))];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& ritz = tri.eigenvalues();
    const auto& vecs = tri.eigenvectors();
    const double lmax = ritz[k - 1];
    Eigen::Index imin = 0;
    while (imin < k - 1 && ritz[imin] <= kZeroEigenvalue * lmax) ++imin;
    best.lambda_max = lmax;
    best.lambda_min_pos = ritz[imin];
    best.kappa = std::sqrt(lmax / ritz[imin]);
    residual = std::max(std::abs(b * vecs(k - 1, k - 1)), std::abs(b * vecs(k - 1, imin)));

    const bool exhausted = b <= 1e-12 * std::max(1.0, lmax);
    if (exhausted || residual <= opts.tol * lmax) return best;
    beta.push_back(b);
    for (int i = 0; i < n; ++i) q[idx(i)] = w[idx(i)] / b;
  }
  if (max_dim == rank) return best;  // full Krylov space of ran(op): Ritz values are exact
  throw ConvergenceError("Lanczos did not converge within " + std::to_string(max_dim) + " steps", best.kappa,
                         residual);
}

ConditionReport condition_number_preconditioned(const ForestPreconditioner& pc, SpectralOptions opts) {
  const int n = pc.n_vertices();
  if (opts.mode == EigenMode::Lanczos) {
    return lanczos_condition(
        pc.partition().graph(),
        [&pc](std::span<const double> x, std::span<double> y) { pc.apply_Pi(x, y); }, opts);
  }
  check_dense_size(n, opts.dense_limit);
  Eigen::MatrixXd Pi(n, n);
  std::vector<double> basis(idx(n), 0.0);
  std::vector<double> column(idx(n));
  for (int j = 0; j < n; ++j) {
    basis[idx(j)] = 1.0;
    pc.apply_Pi(basis, column);
    basis[idx(j)] = 0.0;
    for (int i = 0; i < n; ++i) Pi(i, j) = column[idx(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pi, Eigen::EigenvaluesOnly);
  return report_from_spectrum(es.eigenvalues());
}

ConditionReport condition_number_unpreconditioned(const WeightedGraph& g, SpectralOptions opts) {
  const int n = g.n_vertices();
  if (opts.mode == EigenMode::Lanczos) {
    std::vector<double> Kx(idx(g.n_edges()));
    return lanczos_condition(
        g,
        [&g, &Kx](std::span<const double> x, std::span<double> y) {
          apply_K(g, x, Kx);
          apply_Kt(g, Kx, y);
        },
        opts);
  }
  check_dense_size(n, opts.dense_limit);
  Eigen::MatrixXd KtK = Eigen::MatrixXd::Zero(n, n);
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const auto [a, b] = g.edge(e);
    const double w2 = g.weight(e) * g.weight(e);
    KtK(a, a) += w2;
    KtK(b, b) += w2;
    KtK(a, b) -= w2;
    KtK(b, a) -= w2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(KtK, Eigen::EigenvaluesOnly);
  return report_from_spectrum(es.eigenvalues());
}

DiagonalPreconditioners diagonal_preconditioners(const WeightedGraph& g, double alpha) {
  if (alpha < 0.0 || alpha > 2.0) throw std::invalid_argument("diagonal_preconditioners: alpha must lie in [0, 2]");
  DiagonalPreconditioners d;
  d.primal.assign(idx(g.n_vertices()), 0.0);
  d.dual.assign(idx(g.n_edges()), 0.0);
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const auto [a, b] = g.edge(e);
    const double w = g.weight(e);
    d.dual[idx(e)] = 2.0 * std::pow(w, alpha);
    const double col = std::pow(w, 2.0 - alpha);
    d.primal[idx(a)] += col;
    d.primal[idx(b)] += col;
  }
  for (auto& s : d.primal) {
    if (s == 0.0) s = 1.0;
  }
  return d;
}

HypothesesReport check_theorem_hypotheses(const ForestPreconditioner& pc, int dense_limit) {
  if (pc.n_parts() != 2) throw std::invalid_argument("check_theorem_hypotheses: partition must have exactly two parts");
  const int n = pc.n_vertices();
  check_dense_size(n, dense_limit);
  const auto& g = pc.partition().graph();

  HypothesesReport r;
  std::vector<EdgeId> all(idx(g.n_edges()));
  for (EdgeId e = 0; e < g.n_edges(); ++e) all[idx(e)] = e;
  r.rank_total = numerical_rank(dense_incidence_transpose(g, all));
  for (int l = 0; l < 2; ++l) r.rank_part[l] = numerical_rank(dense_incidence_transpose(g, pc.partition().part(l).edges));

  r.ranges_intersect = r.rank_part[0] + r.rank_part[1] > r.rank_total;
  r.rank_exceeds_min = r.rank_total > std::min(r.rank_part[0], r.rank_part[1]);
  r.lower_bound_applies = r.ranges_intersect && r.rank_exceeds_min;

  const Eigen::MatrixXd P1 = dense_projection(pc, 0);
  const Eigen::MatrixXd P2 = dense_projection(pc, 1);
  const Eigen::MatrixXd P12 = P1 * P2;
  r.commutator_norm = (P12 - P2 * P1).norm();
  r.commute = r.commutator_norm <= 1e-10;
  // dim ker(Pi_1 Pi_2) > dim ker(Pi) and ker(Pi) is inside ker(Pi_1 Pi_2).
  r.kernel_condition = numerical_rank(P12) < r.rank_total;
  r.optimal_applies = r.commute && r.kernel_condition && r.ranges_intersect;
  return r;
}

}  // namespace combprec
