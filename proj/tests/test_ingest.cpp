#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "combprec/errors.hpp"
#include "combprec/ingest.hpp"
#include "combprec/pdhg.hpp"

using namespace combprec;

namespace {

const char* kToy =
    "c toy network\n"
    "p max 4 5\n"
    "n 1 s\n"
    "n 4 t\n"
    "a 1 2 3\n"
    "a 2 4 1\n"
    "a 3 4 2\n"
    "a 2 3 1\n"
    "a 3 2 1\n";

template <class F>
std::string parse_error_message(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("DIMACS parsing") {
  const auto net = parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 t\na 1 2 5\n");
  CHECK(net.n_nodes == 2);
  CHECK(net.source == 0);
  CHECK(net.sink == 1);
  REQUIRE(net.arcs.size() == 1);
  CHECK(net.arcs[0] == Arc{0, 1, 5.0});

  const auto toy = parse_dimacs_maxflow(kToy);
  CHECK(toy.arcs.size() == 5);
  CHECK(parse_dimacs_maxflow(serialize_dimacs_maxflow(toy)) == toy);

  FlowNetwork odd{3, 2, 0, {{2, 1, 0.1}, {1, 0, 1.0 / 3.0}, {2, 0, 1e-17}}};
  CHECK(parse_dimacs_maxflow(serialize_dimacs_maxflow(odd)) == odd);
}

TEST_CASE("DIMACS errors name the problem") {
  const auto mismatch = parse_error_message([] { parse_dimacs_maxflow("p max 2 2\nn 1 s\nn 2 t\na 1 2 5\n"); });
  CHECK(mismatch.find("2") != std::string::npos);
  CHECK_FALSE(mismatch.empty());
  CHECK_THROWS_AS(parse_dimacs_maxflow("n 1 s\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("c only\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 s\na 1 2 5\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 1 t\na 1 2 5\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 t\na 1 x 5\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 t\na 1 3 5\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 t\na 1 2 -5\n"), ParseError);
  const auto line = parse_error_message([] { parse_dimacs_maxflow("p max 2 1\nn 1 s\nn 2 t\na 1 2\n"); });
  CHECK(line.find("4") != std::string::npos);
}

TEST_CASE("max-flow to ROF") {
  const auto toy = parse_dimacs_maxflow(kToy);
  const auto inst = maxflow_to_rof(toy);
  CHECK(inst.symmetric);
  CHECK(inst.graph.n_vertices() == 2);
  CHECK(inst.f == std::vector<double>{2, -2});
  REQUIRE(inst.graph.n_edges() == 1);
  CHECK(inst.graph.weight(0) == 1.0);
  CHECK(maxflow_oracle(toy) == 2.0);

  const auto r = pdhg_solve(make_rof(inst.graph, inst.f), {PrecondMode::None}, {.tol = 1e-10});
  CHECK(threshold_cut_capacity(toy, inst, r.u) == doctest::Approx(2.0).epsilon(1e-6));

  const auto asym = maxflow_to_rof(parse_dimacs_maxflow("p max 4 4\nn 1 s\nn 4 t\na 1 2 1\na 2 3 2\na 3 2 1\na 3 4 1\n"));
  CHECK_FALSE(asym.symmetric);
  CHECK(asym.graph.weight(0) == 1.5);
}

TEST_CASE("max-flow oracle") {
  CHECK(maxflow_oracle(parse_dimacs_maxflow("p max 3 2\nn 1 s\nn 3 t\na 1 2 7\na 2 3 7\n")) == 7.0);
  const auto zero = parse_dimacs_maxflow("p max 3 2\nn 1 s\nn 3 t\na 1 2 0\na 2 3 0\n");
  CHECK(maxflow_oracle(zero) == 0.0);
  const auto inst = maxflow_to_rof(zero);
  CHECK(inst.graph.n_edges() == 0);
  const auto r = pdhg_solve(make_rof(inst.graph, inst.f), {PrecondMode::None});
  CHECK(r.u == inst.f);
  CHECK(threshold_cut_capacity(zero, inst, r.u) == 0.0);
  CHECK_THROWS_AS(maxflow_oracle(parse_dimacs_maxflow(kToy), 2), SizeLimitError);
}

TEST_CASE("cut capacity is an upper bound on the flow") {
  Rng rng(2);
  const auto toy = parse_dimacs_maxflow(kToy);
  const double flow = maxflow_oracle(toy);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<bool> side(4, false);
    side[0] = true;
    side[1] = rng.uniform() < 0.5;
    side[2] = rng.uniform() < 0.5;
    CHECK(cut_capacity(toy, side) >= flow - 1e-12);
  }
}

TEST_CASE("grid graphs") {
  const int d2[2] = {3, 2};
  const auto g = make_grid_graph(d2);
  CHECK(g.n_vertices() == 6);
  CHECK(g.n_edges() == 7);
  CHECK(g.edge(0) == Edge{0, 1});
  CHECK(g.edge(4) == Edge{0, 3});
  const int d3[3] = {2, 1, 3};
  CHECK(make_grid_graph(d3).n_edges() == 1 * 3 + 2 * 2);
}

TEST_CASE("image weights") {
  Image flat{3, 2, 3, std::vector<double>(18, 0.4)};
  const auto gf = image_to_grid(flat);
  for (double w : gf.weights()) CHECK(w == 1.0);

  Image img{2, 2, 3, {0, 0, 0, 1, 1, 1, 0.5, 0.2, 0.9, 0, 1, 0}};
  const auto g0 = image_to_grid(img, 0.0);
  for (double w : g0.weights()) CHECK(w == 1.0);
  const auto g = image_to_grid(img, 1.0 / 3.0);
  CHECK(g.weight(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  const auto g5 = image_to_grid(img, 5.0);
  for (double w : g5.weights()) {
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
  CHECK_THROWS_AS(image_to_grid(Image{}), std::invalid_argument);
}

TEST_CASE("PNM parsing") {
  const auto p2 = parse_pnm("P2\n# comment\n2 2\n255\n0 255\n51 102\n");
  CHECK(p2.width == 2);
  CHECK(p2.channels == 1);
  CHECK(p2.at(1, 0, 0) == 1.0);
  CHECK(p2.at(0, 1, 0) == doctest::Approx(0.2));

  std::string p6 = "P6 1 1 255\n";
  p6 += static_cast<char>(255);
  p6 += static_cast<char>(0);
  p6 += static_cast<char>(51);
  const auto rgb = parse_pnm(p6);
  CHECK(rgb.channels == 3);
  CHECK(rgb.at(0, 0, 0) == 1.0);
  CHECK(rgb.at(0, 0, 2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(parse_pnm("P7\n"), ParseError);
  CHECK_THROWS_AS(parse_pnm("P5 2 2 255\n\x01"), ParseError);

  const auto path = (std::filesystem::temp_directory_path() / "combprec_test.pgm").string();
  const std::vector<int> vals{0, 128, 255, 7};
  write_pgm(path, 2, 2, vals);
  const auto back = read_pnm(path);
  CHECK(back.at(1, 1, 0) == doctest::Approx(7.0 / 255.0));
  std::filesystem::remove(path);
}

TEST_CASE("three moons") {
  const auto pts = three_moons(50, 0.0, 4);
  CHECK(pts.size() == 150);
  for (int i = 0; i < pts.size(); ++i) {
    const int k = pts.labels[static_cast<std::size_t>(i)];
    const double cx = 1.5 * k;
    const double cy = k % 2 ? 0.4 : 0.0;
    const double x = pts.coords[static_cast<std::size_t>(2 * i)] - cx;
    const double y = pts.coords[static_cast<std::size_t>(2 * i + 1)] - cy;
    CHECK(x * x + y * y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((k % 2 ? -y : y) >= -1e-12);
  }
  int seeds[3] = {0, 0, 0};
  for (int i = 0; i < pts.size(); ++i) {
    if (pts.seed_mask[static_cast<std::size_t>(i)]) ++seeds[pts.labels[static_cast<std::size_t>(i)]];
  }
  for (int s : seeds) CHECK(s == 3);  // round(0.05 * 50)

  const auto again = three_moons(50, 0.1, 4);
  const auto same = three_moons(50, 0.1, 4);
  CHECK(again.coords == same.coords);
  CHECK(again.seed_mask == same.seed_mask);
}

TEST_CASE("kNN graphs") {
  LabeledPoints line{2, {0, 0, 1, 0, 2, 0}, {}, {}};
  const auto g = knn_graph(line, 1);
  CHECK(g.n_edges() == 2);
  CHECK(g.edge(0) == Edge{0, 1});
  CHECK(g.edge(1) == Edge{1, 2});
  CHECK_THROWS_AS(knn_graph(line, 3), std::invalid_argument);

  const auto pts = three_moons(40, 0.1, 7);
  const int k = 5;
  const auto h = knn_graph(pts, k);
  std::set<std::pair<int, int>> adj;
  for (const auto& e : h.edges()) {
    CHECK(e.tail < e.head);
    adj.insert({e.tail, e.head});
    adj.insert({e.head, e.tail});
  }
  const int n = pts.size();
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = pts.coords[static_cast<std::size_t>(2 * i)] - pts.coords[static_cast<std::size_t>(2 * j)];
      const double dy = pts.coords[static_cast<std::size_t>(2 * i + 1)] - pts.coords[static_cast<std::size_t>(2 * j + 1)];
      d.push_back({dx * dx + dy * dy, j});
    }
    std::sort(d.begin(), d.end());
    for (int r = 0; r < k; ++r) CHECK(adj.count({i, d[static_cast<std::size_t>(r)].second}) == 1);
  }

  const auto gw = knn_graph(line, 1, KnnWeighting::Gaussian, 1.0);
  CHECK(gw.weight(0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("unaries from labels") {
  LabeledPoints pts{2, {0, 0, 1, 1}, {2, 1}, {false, true}};
  const auto rho = unaries_from_labels(pts, 3);
  CHECK(rho == std::vector<double>{0, 100, 0, -100, 0, 100});
  pts.seed_mask = {false, false};
  for (double x : unaries_from_labels(pts, 3)) CHECK(x == 0.0);
  pts.seed_mask = {true, false};
  CHECK_THROWS_AS(unaries_from_labels(pts, 2), std::invalid_argument);
}

TEST_CASE("random graphs") {
  const auto er = erdos_renyi(30, 60, 1);
  CHECK(er.n_edges() == 60);
  std::set<std::pair<int, int>> seen;
  for (const auto& e : er.edges()) {
    CHECK(e.tail < e.head);
    CHECK(seen.insert({e.tail, e.head}).second);
  }
  CHECK(erdos_renyi(30, 60, 1).edges().size() == 60);
  const auto rc = random_connected_graph(30, 45, 2);
  CHECK(rc.n_edges() == 45);
  CHECK(count_components(rc) == 1);
  CHECK_THROWS_AS(erdos_renyi(4, 7, 0), std::invalid_argument);
}

TEST_CASE("text formats") {
  const auto g = parse_graph("# demo\nv 3\ne 0 1\ne 1 2 2.5\n");
  CHECK(g.n_vertices() == 3);
  CHECK(g.weight(1) == 2.5);
  const auto back = parse_graph(serialize_graph(g));
  CHECK(back.n_edges() == 2);
  CHECK(back.weight(0) == 1.0);
  CHECK_THROWS_AS(parse_graph("e 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("v 2\ne 0 5\n"), ParseError);

  const std::vector<double> v{1.5, -2, 1.0 / 3.0};
  CHECK(parse_vector(serialize_vector(v)) == v);
  CHECK_THROWS_AS(parse_vector("1 two 3"), ParseError);

  const auto m = parse_csv_matrix("a,b\n1,2\n3,4.5\n");
  REQUIRE(m.size() == 2);
  CHECK(m[1][1] == 4.5);
}
