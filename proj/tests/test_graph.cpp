#include <doctest.h>

#include <cmath>
#include <numbers>

#include "combprec/errors.hpp"
#include "combprec/graph.hpp"
#include "combprec/ingest.hpp"
#include "oracles.hpp"

using namespace combprec;

namespace {

WeightedGraph path3() { return WeightedGraph(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST_CASE("grad evaluates tail minus head") {
  CHECK(grad(WeightedGraph(2, {{0, 1}}), std::vector<double>{3, 1}) == std::vector<double>{2});
  CHECK(grad(path3(), std::vector<double>{0, 3, 0}) == std::vector<double>{-3, 3});
  const auto g = random_connected_graph(12, 20, 1);
  for (double x : grad(g, std::vector<double>(12, 4.5))) CHECK(x == 0.0);
  CHECK_THROWS_AS(grad(path3(), std::vector<double>{1, 2}), DimensionError);
}

TEST_CASE("K and its adjoint") {
  WeightedGraph g(2, {{0, 1}}, {2.0});
  CHECK(apply_K(g, std::vector<double>{1, 0}) == std::vector<double>{2});
  CHECK(apply_Kt(path3(), std::vector<double>{1, -1}) == std::vector<double>{1, -2, 1});

  Rng rng(11);
  std::vector<Edge> edges;
  std::vector<double> w;
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      if (rng.uniform() < 0.4) {
        edges.push_back({i, j});
        w.push_back(0.1 + 2.0 * rng.uniform());
      }
    }
  }
  WeightedGraph h(10, edges, w);
  const double normK = sigma_max(h);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u(10), p(static_cast<std::size_t>(h.n_edges()));
    for (auto& x : u) x = rng.normal();
    for (auto& x : p) x = rng.normal();
    const double lhs = dot(apply_K(h, u), p);
    const double rhs = dot(u, apply_Kt(h, p));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * norm2(u) * norm2(p) * normK);
  }
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(2, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1}}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1}}, {1.0, 2.0}), std::invalid_argument);
  WeightedGraph par(2, {{0, 1}, {1, 0}});
  CHECK(par.has_parallel_edges());
  CHECK_FALSE(path3().has_parallel_edges());
}

TEST_CASE("connected components use the smallest id as label") {
  CHECK(connected_components(WeightedGraph(3, {})) == std::vector<VertexId>{0, 1, 2});
  CHECK(connected_components(path3()) == std::vector<VertexId>{0, 0, 0});
  CHECK(connected_components(WeightedGraph(3, {{0, 1}})) == std::vector<VertexId>{0, 0, 2});
  CHECK(connected_components(WeightedGraph(4, {{3, 1}})) == std::vector<VertexId>{0, 1, 2, 1});
}

TEST_CASE("forest predicates") {
  const WeightedGraph k3(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK_FALSE(is_forest(k3));
  CHECK_FALSE(is_linear_forest(k3));
  const WeightedGraph star(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(is_forest(star));
  CHECK_FALSE(is_linear_forest(star));
  CHECK(is_forest(path3()));
  CHECK(is_linear_forest(path3()));
  CHECK_FALSE(is_forest(WeightedGraph(2, {{0, 1}, {0, 1}})));
}

TEST_CASE("rank of grad^T matches a dense oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 5 + static_cast<int>(seed % 40);
    const int m = static_cast<int>((seed * 7) % static_cast<std::uint64_t>(n * 2));
    const auto g = erdos_renyi(n, m, seed);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    CHECK(incidence_rank(g) == oracle::dense_rank(oracle::dense_grad(n, edges)));
    CHECK(incidence_rank(g) == n - count_components(g));
  }
}

TEST_CASE("sigma_max") {
  CHECK(sigma_max(WeightedGraph(2, {{0, 1}})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK(sigma_max(path3()) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
  CHECK(sigma_max(WeightedGraph(3, {{0, 1}, {1, 2}}, {3.0, 3.0})) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-8));
  CHECK_THROWS(sigma_max(WeightedGraph(3, {})));
  for (int n1 = 3; n1 <= 9; n1 += 3) {
    for (int n2 = 2; n2 <= 8; n2 += 3) {
      const int dims[2] = {n1, n2};
      const double lmax = 4.0 - 2.0 * std::cos(std::numbers::pi * (n1 - 1) / n1) -
                          2.0 * std::cos(std::numbers::pi * (n2 - 1) / n2);
      CHECK(std::abs(sigma_max(make_grid_graph(dims), {1e-14, 200000}) - std::sqrt(lmax)) <= 1e-8);
    }
  }
}

TEST_CASE("flipping an edge negates its gradient entry") {
  const auto g = random_connected_graph(8, 12, 5);
  const auto h = g.with_flipped_edge(3);
  std::vector<double> u{1, 4, 2, 8, 5, 7, 3, 6};
  const auto a = grad(g, u);
  const auto b = grad(h, u);
  for (int e = 0; e < g.n_edges(); ++e) CHECK(b[static_cast<std::size_t>(e)] == (e == 3 ? -a[3] : a[static_cast<std::size_t>(e)]));
}
