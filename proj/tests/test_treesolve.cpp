#include <doctest.h>

#include <cmath>
#include <numeric>

#include "combprec/ingest.hpp"
#include "combprec/treesolve.hpp"
#include "oracles.hpp"

using namespace combprec;

namespace {

struct RandomTree {
  int n;
  std::vector<Edge> edges;
  std::vector<double> w;
  std::vector<double> f;
};

RandomTree random_tree(Rng& rng, int max_edges = 10) {
  RandomTree t;
  t.n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges)));
  for (int v = 1; v < t.n; ++v) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    t.edges.push_back(rng.uniform() < 0.5 ? Edge{u, v} : Edge{v, u});
    t.w.push_back(2.0 * (1.0 - rng.uniform()));  // (0, 2]
  }
  for (int i = 0; i < t.n; ++i) t.f.push_back(-5.0 + 10.0 * rng.uniform());
  return t;
}

RootedForest whole(int n, const std::vector<Edge>& edges) {
  std::vector<EdgeId> ids(edges.size());
  std::iota(ids.begin(), ids.end(), 0);
  return RootedForest::build(n, edges, ids);
}

}  // namespace

TEST_CASE("clip") {
  CHECK(clip(5, -1, 1) == 1);
  CHECK(clip(0.3, -1, 1) == 0.3);
  CHECK(clip(-7, -2, 2) == -2);
  CHECK_THROWS_AS(clip(0, 1, -1), std::invalid_argument);
}

TEST_CASE("piecewise-linear derivative") {
  PwlDerivative m(1.0, -2.0);  // u - 2
  m.add_ramp(1.0, 2.0);        // + 2 (u - 1)_+
  CHECK(m(0.0) == doctest::Approx(-2.0));
  CHECK(m(3.0) == doctest::Approx(5.0));
  CHECK(m.solve(0.0) == doctest::Approx(4.0 / 3.0));
  CHECK(m(m.solve(1.7)) == doctest::Approx(1.7));

  const auto iv = m.clip_symmetric(1.0);
  CHECK(iv.lo == doctest::Approx(1.0));
  CHECK(iv.hi == doctest::Approx(5.0 / 3.0));
  CHECK(m(-10.0) == doctest::Approx(-1.0));
  CHECK(m(10.0) == doctest::Approx(1.0));
  CHECK(m(1.5) == doctest::Approx(0.5));

  PwlDerivative flat;
  CHECK_THROWS_AS(flat.solve(1.0), std::domain_error);

  PwlDerivative a(1.0, 0.0), b(1.0, -1.0);
  b.add_ramp(0.5, 1.0);
  a.absorb(b);
  CHECK(a(2.0) == doctest::Approx(2.0 + 1.0 + 1.5));
  CHECK(b.n_breakpoints() == 0);
}

TEST_CASE("tree TV closed-form examples") {
  {
    const std::vector<Edge> e{{0, 1}};
    const auto v = tv_on_forest(whole(2, e), e, std::vector<double>{1.0}, std::vector<double>{0, 2});
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(1.0));
  }
  {
    const std::vector<Edge> e{{0, 1}, {1, 2}};
    const auto part = whole(3, e);
    const std::vector<double> f{0, 3, 0}, w{1, 1};
    const auto v = tv_on_forest(part, e, w, f);
    for (double x : v) CHECK(x == doctest::Approx(1.0));
    std::vector<double> p(2);
    TreeWorkspace ws;
    recover_dual(part, e, w, v, f, p, ws);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(-1.0));
  }
  {
    const std::vector<Edge> e{{0, 1}, {1, 2}, {1, 3}};
    const std::vector<double> f{3, -1, 4, 0.5}, w{0, 0, 0};
    const auto v = tv_on_forest(whole(4, e), e, w, f);
    CHECK(v == f);
  }
}

TEST_CASE("tree TV matches the KKT enumeration oracle and is certified") {
  Rng rng(2024);
  TreeWorkspace ws;
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_tree(rng);
    const auto part = whole(t.n, t.edges);
    std::vector<double> v(static_cast<std::size_t>(t.n));
    tv_on_forest(part, t.edges, t.w, t.f, v, ws);
    const auto ref = oracle::kkt_tree_tv(t.n, t.edges, t.w, t.f);
    REQUIRE(ref.has_value());
    CHECK(std::abs(oracle::tv_energy(t.edges, t.w, t.f, v) - ref->energy) <= 1e-8);
    for (int i = 0; i < t.n; ++i) CHECK(std::abs(v[static_cast<std::size_t>(i)] - ref->v[static_cast<std::size_t>(i)]) <= 1e-6);

    std::vector<double> p(t.edges.size());
    recover_dual(part, t.edges, t.w, v, t.f, p, ws);
    std::vector<double> wp(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) wp[k] = t.w[k] * p[k];
    const WeightedGraph unit(t.n, t.edges);
    const auto Ktp = apply_Kt(unit, wp);
    double mean_residual = 0.0;
    for (int i = 0; i < t.n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      CHECK(std::abs(Ktp[ii] - (v[ii] - t.f[ii])) <= 1e-10);
      mean_residual += v[ii] - t.f[ii];
    }
    CHECK(std::abs(mean_residual) <= 1e-10);
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(std::abs(p[k]) <= 1.0 + 1e-8);
      const double jump = v[static_cast<std::size_t>(t.edges[k].tail)] - v[static_cast<std::size_t>(t.edges[k].head)];
      // The dual of the dual-block form pulls against the jump: p_e = -sign(grad v)_e.
      if (std::abs(jump) > 1e-8) CHECK(std::abs(p[k] + (jump > 0 ? 1.0 : -1.0)) <= 1e-8);
    }
  }
}

TEST_CASE("tree TV is nonexpansive in f") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = random_tree(rng);
    const auto part = whole(t.n, t.edges);
    const auto v1 = tv_on_forest(part, t.edges, t.w, t.f);
    std::vector<double> g = t.f, delta(t.f.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      delta[i] = 0.5 * rng.normal();
      g[i] += delta[i];
    }
    const auto v2 = tv_on_forest(part, t.edges, t.w, g);
    std::vector<double> dv(v1.size());
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = v2[i] - v1[i];
    CHECK(norm2(dv) <= norm2(delta) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("forests with isolated vertices and several trees") {
  // Trees {0,2,5}, {1,4}; vertex 3 untouched.
  const std::vector<Edge> e{{2, 0}, {5, 2}, {1, 4}};
  const auto part = whole(6, e);
  const std::vector<double> f{1, -2, 4, 9, 3, -1}, w{0.5, 1.5, 0.25};
  const auto v = tv_on_forest(part, e, w, f);
  CHECK(v[3] == f[3]);
  const auto ref = oracle::kkt_tree_tv(6, e, w, f);
  REQUIRE(ref.has_value());
  for (std::size_t i = 0; i < 6; ++i) CHECK(v[i] == doctest::Approx(ref->v[i]).epsilon(1e-10));
}

TEST_CASE("edge orientation flips the dual only") {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {3, 1}};
  const std::vector<Edge> flipped{{0, 1}, {2, 1}, {3, 1}};
  const std::vector<double> f{4, 0, -3, 1}, w{1, 0.7, 0.4};
  TreeWorkspace ws;
  const auto a = tv_on_forest(whole(4, e), e, w, f);
  const auto b = tv_on_forest(whole(4, flipped), flipped, w, f);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]));
  std::vector<double> pa(3), pb(3);
  recover_dual(whole(4, e), e, w, a, f, pa, ws);
  recover_dual(whole(4, flipped), flipped, w, b, f, pb, ws);
  CHECK(pa[0] == doctest::Approx(pb[0]));
  CHECK(pa[1] == doctest::Approx(-pb[1]));
  CHECK(pa[2] == doctest::Approx(pb[2]));
}

TEST_CASE("recover_dual rejects inconsistent input") {
  const std::vector<Edge> e{{0, 1}};
  TreeWorkspace ws;
  std::vector<double> p(1);
  CHECK_THROWS_AS(recover_dual(whole(2, e), e, std::vector<double>{1}, std::vector<double>{0, 0},
                               std::vector<double>{1, 0}, p, ws),
                  std::runtime_error);
  const std::vector<double> f{2, -1};
  recover_dual(whole(2, e), e, std::vector<double>{5}, f, f, p, ws);
  CHECK(p[0] == 0.0);
}

TEST_CASE("dual block update") {
  TreeWorkspace ws;
  const std::vector<Edge> e{{0, 1}};
  const auto part = whole(2, e);
  const std::vector<double> w{1.0};
  std::vector<double> p{0.0};
  dual_block_update(part, e, w, p, std::vector<double>{0, 0}, 2.0, ws);
  CHECK(p[0] == 0.0);
  for (double t : {0.5, 1.0, 3.0}) {
    p[0] = 0.0;
    dual_block_update(part, e, w, p, std::vector<double>{t, -t}, t, ws);
    CHECK(p[0] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(dual_block_update(part, e, w, p, std::vector<double>{0, 0}, 0.0, ws), std::invalid_argument);

  // Against the generic definition: minimize 1/2 ||K^T p + f_l||^2 over the box by
  // projected gradient on a random small tree.
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_tree(rng, 6);
    const auto pt = whole(t.n, t.edges);
    const WeightedGraph g(t.n, t.edges, t.w);
    std::vector<double> p0(t.edges.size()), ubar(static_cast<std::size_t>(t.n));
    for (auto& x : p0) x = -1.0 + 2.0 * rng.uniform();
    for (auto& x : ubar) x = 3.0 * rng.normal();
    const double tt = 0.5 + rng.uniform();
    std::vector<double> fl = apply_Kt(g, p0);
    for (std::size_t i = 0; i < fl.size(); ++i) fl[i] = -fl[i] - ubar[i] / tt;
    std::vector<double> q(t.edges.size(), 0.0);
    const double L = 2.0 * sigma_max(g) * sigma_max(g);
    for (int it = 0; it < 200000; ++it) {
      auto r = apply_Kt(g, q);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += fl[i];
      const auto grad_q = apply_K(g, r);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::clamp(q[k] - grad_q[k] / L, -1.0, 1.0);
    }
    auto p = p0;
    dual_block_update(pt, t.edges, t.w, p, ubar, tt, ws);
    auto obj = [&](const std::vector<double>& x) {
      auto r = apply_Kt(g, x);
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += 0.5 * (r[i] + fl[i]) * (r[i] + fl[i]);
      return s;
    };
    for (double x : p) CHECK(std::abs(x) <= 1.0 + 1e-10);
    CHECK(obj(p) <= obj(q) + 1e-9);
  }
}
