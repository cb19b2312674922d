#include "combprec/pdhg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "combprec/errors.hpp"
#include "combprec/precond.hpp"
#include "combprec/treesolve.hpp"

namespace combprec {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

// Root of eps * w + s * exp(w) = c. The start lies right of the root, where Newton on
// this convex increasing function decreases monotonically.
double entropy_channel_root(double c, double eps, double s) {
  double w = std::min(c / eps, std::log(std::abs(c) / s + 1.0));
  for (int it = 0; it < 200; ++it) {
    const double ew = std::exp(w);
    const double step = (eps * w + s * ew - c) / (eps + s * ew);
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

void check_finite(std::span<const double> v, const char* name, int iter) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw DivergenceError(std::string("pdhg: non-finite ") + name + " at iteration " + std::to_string(iter));
    }
  }
}

}  // namespace

int Problem::channels() const {
  if (const auto* se = std::get_if<SimplexEntropyData>(&data)) return se->classes;
  return 1;
}

void Problem::validate() const {
  if (!graph) throw std::invalid_argument("Problem: graph is null");
  const auto n = idx(graph->n_vertices());
  if (const auto* rof = std::get_if<RofData>(&data)) {
    if (rof->f.size() != n) throw DimensionError("Problem: f has length " + std::to_string(rof->f.size()) +
                                                 ", expected " + std::to_string(n));
    return;
  }
  const auto& se = std::get<SimplexEntropyData>(data);
  if (se.classes < 1) throw std::invalid_argument("Problem: classes must be positive");
  if (!(se.epsilon > 0.0)) throw std::invalid_argument("Problem: epsilon must be positive");
  if (se.rho.size() != n * idx(se.classes)) throw DimensionError("Problem: rho must hold |V| * classes entries");
}

Problem make_rof(const WeightedGraph& g, std::vector<double> f) {
  Problem p{&g, RofData{std::move(f)}};
  p.validate();
  return p;
}

Problem make_simplex_entropy(const WeightedGraph& g, int classes, std::vector<double> rho, double epsilon) {
  Problem p{&g, SimplexEntropyData{classes, std::move(rho), epsilon}};
  p.validate();
  return p;
}

std::string to_string(PrecondMode mode) {
  switch (mode) {
    case PrecondMode::None: return "none";
    case PrecondMode::Diagonal: return "diag";
    case PrecondMode::Partition: return "partition";
  }
  return "unknown";
}

std::vector<double> primal_update_rof(std::span<const double> u_k, std::span<const double> Ktp,
                                      std::span<const double> f, double s) {
  if (u_k.size() != f.size() || Ktp.size() != f.size()) throw DimensionError("primal_update_rof: length mismatch");
  if (!(s > 0.0)) throw std::invalid_argument("primal_update_rof: s must be positive");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = (f[i] + s * u_k[i] - Ktp[i]) / (1.0 + s);
  return out;
}

void simplex_entropy_prox(std::span<const double> z, std::span<const double> rho, double epsilon, double s,
                          std::span<double> out) {
  const std::size_t C = z.size();
  if (rho.size() != C || out.size() != C || C == 0) throw DimensionError("simplex_entropy_prox: length mismatch");
  if (!(epsilon > 0.0) || !(s > 0.0)) throw std::invalid_argument("simplex_entropy_prox: eps and s must be positive");

  // KKT: eps (log u_c + 1) + rho_c + s (u_c - z_c) + nu = 0 and sum u = 1.
  // h(nu) = sum_c u_c(nu) - 1 is convex and decreasing; nu0 below has h(nu0) <= 0.
  thread_local std::vector<double> a;
  a.resize(C);
  for (std::size_t c = 0; c < C; ++c) a[c] = (s * z[c] - rho[c] - epsilon) / epsilon;
  double nu = epsilon * log_sum_exp(a);
  for (std::size_t c = 0; c < C; ++c) a[c] = s * z[c] - rho[c] - epsilon;

  double lo = -std::numeric_limits<double>::infinity();  // h(lo) > 0
  double hi = nu;                                        // h(hi) <= 0
  double h = 0.0;
  bool done = false;
  for (int it = 0; it < 100; ++it) {
    double sum = 0.0;
    double dsum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      const double u = std::exp(entropy_channel_root(a[c] - nu, epsilon, s));
      out[c] = u;
      sum += u;
      dsum += u / (epsilon + s * u);
    }
    h = sum - 1.0;
    if (std::abs(h) <= 1e-15 * static_cast<double>(C)) {
      done = true;
      break;
    }
    if (h > 0.0) lo = std::max(lo, nu);
    else hi = std::min(hi, nu);
    double next = nu + h / dsum;
    if (!(next > lo && next < hi) && std::isfinite(lo)) next = 0.5 * (lo + hi);
    if (next == nu) {
      done = true;
      break;
    }
    nu = next;
  }
  if (!done && std::abs(h) > 1e-10) {
    throw ConvergenceError("simplex_entropy_prox: outer Newton did not converge in 100 steps", nu, std::abs(h));
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) sum += out[c];
  for (std::size_t c = 0; c < C; ++c) out[c] /= sum;
}

std::vector<double> primal_update_simplex_entropy(std::span<const double> u_k, std::span<const double> Ktp,
                                                  std::span<const double> rho, int classes, double epsilon,
                                                  double s) {
  if (classes < 1 || u_k.size() % idx(classes) != 0) throw DimensionError("primal_update_simplex_entropy: bad classes");
  if (Ktp.size() != u_k.size() || rho.size() != u_k.size()) {
    throw DimensionError("primal_update_simplex_entropy: length mismatch");
  }
  const std::size_t C = idx(classes);
  const std::size_t n = u_k.size() / C;
  std::vector<double> out(u_k.size());
  std::vector<double> z(C), r(C), o(C);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      z[c] = u_k[c * n + i] - Ktp[c * n + i] / s;
      r[c] = rho[c * n + i];
    }
    simplex_entropy_prox(z, r, epsilon, s, o);
    for (std::size_t c = 0; c < C; ++c) out[c * n + i] = o[c];
  }
  return out;
}

void accelerate_step(StepState& state, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("accelerate_step: gamma must be nonnegative");
  if (gamma == 0.0) {
    state.theta = 1.0;
    return;
  }
  state.theta = 1.0 / std::sqrt(1.0 + 2.0 * gamma / state.s);
  state.s /= state.theta;
  state.t *= state.theta;
}

GapReport primal_dual_gap(const Problem& problem, std::span<const double> u, std::span<const double> p) {
  problem.validate();
  const WeightedGraph& g = *problem.graph;
  const std::size_t n = idx(g.n_vertices());
  const std::size_t m = idx(g.n_edges());
  const std::size_t C = idx(problem.channels());
  if (u.size() != n * C || p.size() != m * C) throw DimensionError("primal_dual_gap: length mismatch");

  std::vector<double> pc(m), Ktp(n * C), Ku(m);
  double tv = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t e = 0; e < m; ++e) pc[e] = std::clamp(p[c * m + e], -1.0, 1.0);
    apply_Kt(g, pc, std::span<double>(Ktp).subspan(c * n, n));
    apply_K(g, u.subspan(c * n, n), Ku);
    for (double x : Ku) tv += std::abs(x);
  }

  GapReport r;
  if (const auto* rof = std::get_if<RofData>(&problem.data)) {
    double fid = 0.0, lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = u[i] - rof->f[i];
      fid += d * d;
      lin += rof->f[i] * Ktp[i];
      quad += Ktp[i] * Ktp[i];
    }
    r.primal = 0.5 * fid + tv;
    r.dual = lin - 0.5 * quad;
  } else {
    const auto& se = std::get<SimplexEntropyData>(problem.data);
    const double eps = se.epsilon;
    double primal = tv;
    double conj = 0.0;
    std::vector<double> v(C);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < C; ++c) {
        const double x = u[c * n + i];
        if (x > 0.0) primal += eps * x * std::log(x);
        primal += x * se.rho[c * n + i];
        v[c] = (-Ktp[c * n + i] - se.rho[c * n + i]) / eps;
      }
      conj += eps * log_sum_exp(v);
    }
    r.primal = primal;
    r.dual = -conj;
  }
  r.rel_gap = (r.primal - r.dual) / std::max(1.0, std::abs(r.primal));
  return r;
}

CutResult threshold_cut(const WeightedGraph& g, std::span<const double> u, double level) {
  if (u.size() != idx(g.n_vertices())) throw DimensionError("threshold_cut: length mismatch");
  CutResult r;
  r.upper.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r.upper[i] = u[i] > level;
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (r.upper[idx(ed.tail)] != r.upper[idx(ed.head)]) {
      r.edges.push_back(e);
      r.value += g.weight(e);
    }
  }
  return r;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  const auto old_precision = os.precision(17);
  os << "iter,primal,dual,rel_gap,elapsed_s\n";
  for (const auto& row : trace) {
    os << row.iter << ',' << row.primal << ',' << row.dual << ',' << row.rel_gap << ',' << row.elapsed_s << '\n';
  }
  os.precision(old_precision);
}

PdhgResult pdhg_solve(const Problem& problem, const Preconditioning& pre, const PdhgOptions& opts) {
  problem.validate();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("pdhg_solve: tol must be positive");
  if (opts.max_iters < 1) throw std::invalid_argument("pdhg_solve: max_iters must be at least 1");
  if (opts.gap_every < 1) throw std::invalid_argument("pdhg_solve: gap_every must be at least 1");
  if (opts.gamma < 0.0) throw std::invalid_argument("pdhg_solve: gamma must be nonnegative");

  const auto setup_start = Clock::now();
  const WeightedGraph& g = *problem.graph;
  const int n = g.n_vertices();
  const int m = g.n_edges();
  const int C = problem.channels();
  const auto N = idx(n) * idx(C);
  const auto M = idx(m) * idx(C);

  // Step sizes and the bound s * t must respect.
  StepState step;
  double bound = 1.0;
  DiagonalPreconditioners diag;
  switch (pre.mode) {
    case PrecondMode::None: {
      const double sigma = m > 0 ? sigma_max(g) : 1.0;
      bound = m > 0 ? sigma * sigma : 0.0;
      step.s = step.t = sigma;
      break;
    }
    case PrecondMode::Diagonal:
      if (pre.alpha < 0.0 || pre.alpha > 2.0) throw std::invalid_argument("pdhg_solve: alpha must lie in [0, 2]");
      diag = diagonal_preconditioners(g, pre.alpha);
      step.s = step.t = 1.0;
      break;
    case PrecondMode::Partition: {
      if (!pre.partition) throw std::invalid_argument("pdhg_solve: partition mode needs a partition");
      if (&pre.partition->graph() != &g) throw std::invalid_argument("pdhg_solve: partition belongs to another graph");
      const double L = pre.partition->n_parts();
      bound = L;
      step.s = step.t = std::sqrt(L) * (opts.strict ? 1.0 + 1e-6 : 1.0);
      break;
    }
  }
  if (opts.s) step.s = *opts.s;
  if (opts.t) step.t = *opts.t;
  if (!(step.s > 0.0) || !(step.t > 0.0)) throw std::invalid_argument("pdhg_solve: step sizes must be positive");
  if (step.s * step.t < bound * (1.0 - 1e-12)) {
    throw std::invalid_argument("pdhg_solve: step-size contract violated, s*t = " + std::to_string(step.s * step.t) +
                                " < " + std::to_string(bound));
  }

  PdhgResult res;
  res.stats.s0 = step.s;
  res.stats.t0 = step.t;
  auto& u = res.u;
  auto& p = res.p;
  u.assign(N, 0.0);
  p.assign(M, 0.0);
  const auto* rof = std::get_if<RofData>(&problem.data);
  const auto* se = std::get_if<SimplexEntropyData>(&problem.data);
  if (rof) {
    u = rof->f;
  } else {
    // Minimizer of the data term alone: softmax(-rho / eps) per vertex.
    std::vector<double> a(idx(C));
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < C; ++c) a[idx(c)] = -se->rho[idx(c) * idx(n) + idx(i)] / se->epsilon;
      const double lse = log_sum_exp(a);
      for (int c = 0; c < C; ++c) u[idx(c) * idx(n) + idx(i)] = std::exp(a[idx(c)] - lse);
    }
  }
  // gamma is the strong-convexity modulus in the Euclidean norm; in the metric
  // diag(S) it shrinks by the largest entry of S.
  double gamma = opts.gamma;
  if (pre.mode == PrecondMode::Diagonal && !diag.primal.empty()) {
    gamma /= *std::max_element(diag.primal.begin(), diag.primal.end());
  }
  std::vector<double> u_new(N), ubar(N), Ktp(N), Kub(idx(m));
  std::vector<double> z(idx(C)), r(idx(C)), o(idx(C));
  TreeWorkspace ws;
  res.stats.setup_s = seconds_since(setup_start);

  const auto solve_start = Clock::now();
  const auto edges = g.edges();
  const auto weights = g.weights();
  for (int k = 1; k <= opts.max_iters; ++k) {
    for (int c = 0; c < C; ++c) {
      apply_Kt(g, std::span<const double>(p).subspan(idx(c) * idx(m), idx(m)),
               std::span<double>(Ktp).subspan(idx(c) * idx(n), idx(n)));
    }
    // Primal step.
    if (rof) {
      for (int i = 0; i < n; ++i) {
        const double si = step.s * (pre.mode == PrecondMode::Diagonal ? diag.primal[idx(i)] : 1.0);
        u_new[idx(i)] = (rof->f[idx(i)] + si * u[idx(i)] - Ktp[idx(i)]) / (1.0 + si);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double si = step.s * (pre.mode == PrecondMode::Diagonal ? diag.primal[idx(i)] : 1.0);
        for (int c = 0; c < C; ++c) {
          const auto at = idx(c) * idx(n) + idx(i);
          z[idx(c)] = u[at] - Ktp[at] / si;
          r[idx(c)] = se->rho[at];
        }
        simplex_entropy_prox(z, r, se->epsilon, si, o);
        for (int c = 0; c < C; ++c) u_new[idx(c) * idx(n) + idx(i)] = o[idx(c)];
      }
    }
    // Relaxation, with the step sizes moved first when accelerating.
    accelerate_step(step, gamma);
    const double theta = gamma > 0.0 ? step.theta : 1.0;
    for (std::size_t i = 0; i < N; ++i) ubar[i] = u_new[i] + theta * (u_new[i] - u[i]);
    u.swap(u_new);

    // Dual step.
    for (int c = 0; c < C; ++c) {
      auto pc = std::span<double>(p).subspan(idx(c) * idx(m), idx(m));
      auto uc = std::span<const double>(ubar).subspan(idx(c) * idx(n), idx(n));
      if (pre.mode == PrecondMode::Partition) {
        for (const auto& part : pre.partition->parts()) dual_block_update(part, edges, weights, pc, uc, step.t, ws);
      } else {
        apply_K(g, uc, Kub);
        for (int e = 0; e < m; ++e) {
          const double te = step.t * (pre.mode == PrecondMode::Diagonal ? diag.dual[idx(e)] : 1.0);
          pc[idx(e)] = std::clamp(pc[idx(e)] + Kub[idx(e)] / te, -1.0, 1.0);
        }
      }
    }

    res.stats.iterations = k;
    if (k == 1 || k % opts.gap_every == 0 || k == opts.max_iters) {
      check_finite(u, "primal iterate", k);
      check_finite(p, "dual iterate", k);
      const GapReport gap = primal_dual_gap(problem, u, p);
      res.stats.gap = gap;
      res.stats.trace.push_back({k, gap.primal, gap.dual, gap.rel_gap, seconds_since(solve_start)});
      if (gap.rel_gap <= opts.tol) {
        res.stats.converged = true;
        break;
      }
    }
  }
  res.stats.solve_s = seconds_since(solve_start);
  return res;
}

}  // namespace combprec
