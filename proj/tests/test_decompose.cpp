#include <doctest.h>

#include <set>

#include "combprec/decompose.hpp"
#include "combprec/errors.hpp"
#include "combprec/ingest.hpp"
#include "oracles.hpp"

using namespace combprec;

namespace {

WeightedGraph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  }
  return WeightedGraph(n, e);
}

std::set<EdgeId> part_set(const EdgePartition& p, int l) {
  return {p.part(l).edges.begin(), p.part(l).edges.end()};
}

void check_valid(const EdgePartition& p, bool linear = false) {
  const auto& g = p.graph();
  std::vector<int> hits(static_cast<std::size_t>(g.n_edges()), 0);
  int prev_rank = g.n_vertices() + 1;
  for (int l = 0; l < p.n_parts(); ++l) {
    const auto& part = p.part(l);
    CHECK_FALSE(part.edges.empty());
    for (EdgeId e : part.edges) ++hits[static_cast<std::size_t>(e)];
    const auto sub = g.subgraph(part.edges);
    CHECK(is_forest(sub));
    if (linear) CHECK(is_linear_forest(sub));
    CHECK(part.rank <= prev_rank);
    prev_rank = part.rank;
  }
  for (int h : hits) CHECK(h == 1);
}

}  // namespace

TEST_CASE("grid chains split by axis") {
  const int d22[2] = {2, 2};
  const auto g = make_grid_graph(d22);
  const auto p = grid_chains(g, d22);
  REQUIRE(p.n_parts() == 2);
  std::set<std::pair<int, int>> p0, p1;
  for (EdgeId e : p.part(0).edges) p0.insert({g.edge(e).tail, g.edge(e).head});
  for (EdgeId e : p.part(1).edges) p1.insert({g.edge(e).tail, g.edge(e).head});
  CHECK(p0 == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK(p1 == std::set<std::pair<int, int>>{{0, 2}, {1, 3}});
  CHECK_FALSE(p.nesting().nested);

  const int d1n[2] = {1, 6};
  const auto path = make_grid_graph(d1n);
  const auto q = grid_chains(path, d1n);
  CHECK(q.n_parts() == 1);
  CHECK(q.part(0).edges.size() == 5);

  const int d33[2] = {3, 3};
  const auto r = grid_chains(oracle::keep(make_grid_graph(d33)), d33);
  REQUIRE(r.n_parts() == 2);
  for (int l = 0; l < 2; ++l) {
    CHECK(r.part(l).edges.size() == 6);
    CHECK(r.part(l).is_linear());
    CHECK(r.part(l).n_trees() == 3);
  }

  const int d234[3] = {2, 3, 4};
  const auto cube = grid_chains(oracle::keep(make_grid_graph(d234)), d234);
  CHECK(cube.n_parts() == 3);
  check_valid(cube, true);

  CHECK_THROWS_AS(grid_chains(oracle::keep(make_grid_graph(d33)), d22), std::invalid_argument);
  CHECK_THROWS_AS(grid_chains(oracle::keep(WeightedGraph(4, {{0, 3}, {0, 1}, {1, 2}})), d22), std::invalid_argument);
}

TEST_CASE("greedy nested forests") {
  const auto tree = random_connected_graph(10, 9, 3);
  CHECK(greedy_nested_forests(tree).n_parts() == 1);

  const auto k3 = greedy_nested_forests(oracle::keep(complete(3)));
  REQUIRE(k3.n_parts() == 2);
  CHECK(k3.part(0).edges.size() == 2);
  CHECK(k3.part(1).edges.size() == 1);
  CHECK(k3.nesting().nested);
  CHECK(k3.nesting().l_hat == 1);

  const auto k4 = greedy_nested_forests(oracle::keep(complete(4)));
  REQUIRE(k4.n_parts() == 2);
  CHECK(k4.part(0).edges.size() == 3);
  CHECK(k4.part(1).edges.size() == 3);
}

TEST_CASE("greedy linear forests") {
  const WeightedGraph path(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const auto p = greedy_linear_forests(path);
  CHECK(p.n_parts() == 1);
  CHECK(p.part(0).edges.size() == 4);

  const WeightedGraph star(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto s = greedy_linear_forests(star);
  REQUIRE(s.n_parts() == 2);
  CHECK(s.part(0).edges.size() == 2);
  CHECK(s.part(1).edges.size() == 1);
  CHECK(s.part(0).is_linear());

  // On the 2x2 grid the first residual step sees a 4-cycle with all degrees 2; the
  // spanning forest plus augmentation takes three edges.
  const int d22[2] = {2, 2};
  const auto grid = greedy_linear_forests(oracle::keep(make_grid_graph(d22)));
  CHECK(grid.n_parts() == 2);
  check_valid(grid, true);
}

TEST_CASE("matroid partition reaches the arboricity") {
  CHECK(matroid_partition(oracle::keep(random_connected_graph(9, 8, 2))).n_parts() == 1);
  CHECK(matroid_partition(oracle::keep(complete(3))).n_parts() == 2);
  const auto k4 = matroid_partition(oracle::keep(complete(4)));
  CHECK(k4.n_parts() == 2);
  CHECK(k4.nesting().nested);
  CHECK(k4.nesting().l_hat == 2);
  CHECK(matroid_partition(oracle::keep(complete(5))).n_parts() == 3);

  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    const int m = std::min(n * (n - 1) / 2, n + static_cast<int>((seed * 5) % 20));
    const auto g = erdos_renyi(n, m, seed);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    const auto mp = matroid_partition(g);
    CHECK(mp.n_parts() == oracle::brute_arboricity(n, edges));
    CHECK(mp.n_parts() == arboricity_oracle(g));
    CHECK(mp.n_parts() <= greedy_nested_forests(g).n_parts());
    check_valid(mp);
    CHECK(mp.nesting().nested);
  }

  CHECK_THROWS_AS(matroid_partition(oracle::keep(complete(8)), {.max_edges = 10}), SizeLimitError);
  CHECK_THROWS_AS(matroid_partition(oracle::keep(WeightedGraph(2, {{0, 1}, {1, 0}}))), std::invalid_argument);
}

TEST_CASE("arboricity oracle") {
  CHECK(arboricity_oracle(random_connected_graph(7, 6, 1)) == 1);
  CHECK(arboricity_oracle(complete(4)) == 2);
  CHECK(arboricity_oracle(complete(5)) == 3);
  CHECK_THROWS_AS(arboricity_oracle(WeightedGraph(17, {})), SizeLimitError);
}

TEST_CASE("partitions are valid, nested where promised and deterministic") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto g = random_connected_graph(30, 30 + static_cast<int>(seed * 4), seed);
    const auto gn = greedy_nested_forests(g);
    const auto gl = greedy_linear_forests(g);
    const auto mp = matroid_partition(g);
    check_valid(gn);
    check_valid(gl, true);
    check_valid(mp);
    CHECK(gn.nesting().nested);
    CHECK(mp.n_parts() <= gn.n_parts());
    CHECK(gn.n_parts() <= g.n_edges());
    const auto gn2 = greedy_nested_forests(g);
    CHECK(std::equal(gn.assignment().begin(), gn.assignment().end(), gn2.assignment().begin()));
    const auto mp2 = matroid_partition(g);
    CHECK(std::equal(mp.assignment().begin(), mp.assignment().end(), mp2.assignment().begin()));
  }
}

TEST_CASE("partition JSON round trip") {
  const auto g = complete(5);
  const auto p = matroid_partition(g);
  const auto q = partition_from_json(g, partition_to_json(p));
  CHECK(q.n_parts() == p.n_parts());
  CHECK(std::equal(p.assignment().begin(), p.assignment().end(), q.assignment().begin()));
  CHECK_THROWS_AS(partition_from_json(g, "{\"L\": 1}"), ParseError);
  CHECK_THROWS_AS(partition_from_json(g, "not json"), ParseError);
  CHECK_THROWS(partition_from_json(g, "{\"L\": 1, \"assignment\": [0,0,0,0,0,0,0,0,0,0]}"));
}

TEST_CASE("rooted forests list trees from the smallest root") {
  const WeightedGraph g(6, {{4, 2}, {2, 5}, {0, 3}});
  const std::vector<EdgeId> all{0, 1, 2};
  const auto f = RootedForest::build(6, g.edges(), all);
  REQUIRE(f.n_trees() == 2);
  CHECK(f.tree(0)[0] == 0);
  CHECK(f.tree(1)[0] == 2);
  CHECK(f.parent[1] == -1);
  CHECK(f.component[1] == 1);
  CHECK(f.rank == 3);
  const WeightedGraph cyc(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_THROWS_AS(RootedForest::build(3, cyc.edges(), all), std::invalid_argument);
}
