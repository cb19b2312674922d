#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "combprec/decompose.hpp"
#include "combprec/errors.hpp"
#include "combprec/ingest.hpp"
#include "combprec/pdhg.hpp"
#include "combprec/precond.hpp"
#include "combprec/treesolve.hpp"

namespace py = pybind11;
using namespace combprec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

WeightedGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges, std::optional<std::vector<double>> w) {
  std::vector<Edge> e;
  e.reserve(edges.size());
  for (const auto& [a, b] : edges) e.push_back({a, b});
  if (w) return WeightedGraph(n, std::move(e), std::move(*w));
  return WeightedGraph(n, std::move(e));
}

EdgePartition partition_for(const WeightedGraph& g, const std::string& strategy, std::optional<std::vector<int>> grid) {
  if (strategy == "chains") {
    if (!grid) throw std::invalid_argument("strategy 'chains' needs grid extents");
    return grid_chains(g, *grid);
  }
  if (strategy == "greedy-nested") return greedy_nested_forests(g);
  if (strategy == "greedy-linear") return greedy_linear_forests(g);
  if (strategy == "matroid") return matroid_partition(g);
  throw std::invalid_argument("unknown strategy '" + strategy + "'");
}

Preconditioning preconditioning(const std::string& mode, const EdgePartition* part) {
  if (mode == "none") return {PrecondMode::None};
  if (mode == "diag") return {PrecondMode::Diagonal};
  if (mode == "partition") {
    if (!part) throw std::invalid_argument("mode 'partition' needs a partition");
    return {PrecondMode::Partition, part};
  }
  throw std::invalid_argument("precond must be 'none', 'diag' or 'partition'");
}

py::dict result_dict(const PdhgResult& r) {
  py::dict d;
  d["u"] = to_array(r.u);
  d["p"] = to_array(r.p);
  d["iterations"] = r.stats.iterations;
  d["converged"] = r.stats.converged;
  d["rel_gap"] = r.stats.gap.rel_gap;
  d["primal"] = r.stats.gap.primal;
  d["dual"] = r.stats.gap.dual;
  d["setup_s"] = r.stats.setup_s;
  d["solve_s"] = r.stats.solve_s;
  return d;
}

PdhgOptions options(double tol, int max_iters, double gamma, int gap_every) {
  PdhgOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  o.gamma = gamma;
  o.gap_every = gap_every;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Combinatorial forest preconditioners for PDHG on graphs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<WeightedGraph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("n_vertices"), py::arg("edges"), py::arg("weights") = py::none())
      .def_property_readonly("n_vertices", &WeightedGraph::n_vertices)
      .def_property_readonly("n_edges", &WeightedGraph::n_edges)
      .def_property_readonly("edges",
                             [](const WeightedGraph& g) {
                               std::vector<std::pair<int, int>> out;
                               for (const auto& e : g.edges()) out.emplace_back(e.tail, e.head);
                               return out;
                             })
      .def_property_readonly("weights",
                             [](const WeightedGraph& g) {
                               return to_array(std::vector<double>(g.weights().begin(), g.weights().end()));
                             })
      .def("__repr__", [](const WeightedGraph& g) {
        return "<Graph |V|=" + std::to_string(g.n_vertices()) + " |E|=" + std::to_string(g.n_edges()) + ">";
      });

  m.def("grid_graph", [](std::vector<int> dims) { return make_grid_graph(dims); }, py::arg("dims"),
        "Grid graph, fastest axis first.");
  m.def("erdos_renyi", &erdos_renyi, py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def("random_connected_graph", &random_connected_graph, py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def("parse_graph", [](const std::string& text) { return parse_graph(text); }, py::arg("text"));
  m.def("serialize_graph", &serialize_graph, py::arg("graph"));

  m.def(
      "grad", [](const WeightedGraph& g, const Array& u) { return to_array(grad(g, to_vector(u))); }, py::arg("graph"),
      py::arg("u"));
  m.def("sigma_max", [](const WeightedGraph& g) { return sigma_max(g); }, py::arg("graph"));

  py::class_<EdgePartition>(m, "Partition")
      .def_property_readonly("n_parts", &EdgePartition::n_parts)
      .def_property_readonly("strategy", &EdgePartition::strategy)
      .def_property_readonly("assignment",
                             [](const EdgePartition& p) { return std::vector<int>(p.assignment().begin(), p.assignment().end()); })
      .def_property_readonly("nested", [](const EdgePartition& p) { return p.nesting().nested; })
      .def_property_readonly("l_hat", [](const EdgePartition& p) { return p.nesting().l_hat; })
      .def_property_readonly("part_sizes",
                             [](const EdgePartition& p) {
                               std::vector<int> s;
                               for (const auto& f : p.parts()) s.push_back(static_cast<int>(f.edges.size()));
                               return s;
                             })
      .def("to_json", &partition_to_json);

  m.def("decompose", &partition_for, py::arg("graph"), py::arg("strategy") = "greedy-nested",
        py::arg("grid") = py::none(), py::keep_alive<0, 1>(),
        "Edge partition into forests: 'chains', 'greedy-nested', 'greedy-linear' or 'matroid'.");
  m.def("arboricity", &arboricity_oracle, py::arg("graph"), "Brute-force arboricity (|V| <= 16).");

  m.def(
      "condition_number",
      [](const WeightedGraph& g, const EdgePartition* part, bool lanczos) {
        SpectralOptions opts;
        if (lanczos) opts.mode = EigenMode::Lanczos;
        const auto r = part ? condition_number_preconditioned(ForestPreconditioner(*part), opts)
                            : condition_number_unpreconditioned(g, opts);
        py::dict d;
        d["kappa"] = r.kappa;
        d["lambda_max"] = r.lambda_max;
        d["lambda_min_pos"] = r.lambda_min_pos;
        return d;
      },
      py::arg("graph"), py::arg("partition") = nullptr, py::arg("lanczos") = false);

  m.def(
      "tv_on_tree",
      [](const WeightedGraph& g, const Array& f) {
        std::vector<EdgeId> ids(static_cast<std::size_t>(g.n_edges()));
        for (EdgeId e = 0; e < g.n_edges(); ++e) ids[static_cast<std::size_t>(e)] = e;
        const auto forest = RootedForest::build(g.n_vertices(), g.edges(), ids);
        return to_array(tv_on_forest(forest, g.edges(), g.weights(), to_vector(f)));
      },
      py::arg("forest"), py::arg("f"), "Exact weighted TV denoising on a forest.");

  m.def(
      "fused_lasso",
      [](const WeightedGraph& g, const Array& f, const std::string& precond, const EdgePartition* part, double tol,
         int max_iters, double gamma, int gap_every) {
        const auto r = pdhg_solve(make_rof(g, to_vector(f)), preconditioning(precond, part),
                                  options(tol, max_iters, gamma, gap_every));
        return result_dict(r);
      },
      py::arg("graph"), py::arg("f"), py::arg("precond") = "partition", py::arg("partition") = nullptr,
      py::arg("tol") = 1e-10, py::arg("max_iters") = 100000, py::arg("gamma") = 0.25, py::arg("gap_every") = 10,
      "Solve 1/2 ||u - f||^2 + ||K u||_1 by PDHG.");

  m.def(
      "segment",
      [](const WeightedGraph& g, const Array& rho, double epsilon, const std::string& precond,
         const EdgePartition* part, double tol, int max_iters, std::optional<double> gamma) {
        if (rho.ndim() != 2 || rho.shape(0) != g.n_vertices()) {
          throw DimensionError("segment: rho must have shape (n_vertices, classes)");
        }
        const int n = g.n_vertices();
        const int C = static_cast<int>(rho.shape(1));
        std::vector<double> r(static_cast<std::size_t>(n) * static_cast<std::size_t>(C));
        auto view = rho.unchecked<2>();
        for (int i = 0; i < n; ++i) {
          for (int c = 0; c < C; ++c) r[static_cast<std::size_t>(c * n + i)] = view(i, c);
        }
        const auto res = pdhg_solve(make_simplex_entropy(g, C, std::move(r), epsilon), preconditioning(precond, part),
                                    options(tol, max_iters, gamma.value_or(1.0 / epsilon), 10));
        py::dict d = result_dict(res);
        py::array_t<double> u({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(C)});
        auto uv = u.mutable_unchecked<2>();
        for (int i = 0; i < n; ++i) {
          for (int c = 0; c < C; ++c) uv(i, c) = res.u[static_cast<std::size_t>(c * n + i)];
        }
        d["u"] = u;
        return d;
      },
      py::arg("graph"), py::arg("rho"), py::arg("epsilon") = 1.0, py::arg("precond") = "partition",
      py::arg("partition") = nullptr, py::arg("tol") = 5e-4, py::arg("max_iters") = 100000,
      py::arg("gamma") = py::none(), "Entropic multi-class labelling; rho has shape (n_vertices, classes).");

  m.def(
      "three_moons",
      [](int n_per_moon, double noise, std::uint64_t seed, double supervision) {
        const auto pts = three_moons(n_per_moon, noise, seed, supervision);
        py::array_t<double> xy({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(2)});
        std::copy(pts.coords.begin(), pts.coords.end(), xy.mutable_data());
        std::vector<bool> mask(pts.seed_mask.begin(), pts.seed_mask.end());
        return py::make_tuple(xy, pts.labels, mask);
      },
      py::arg("n_per_moon"), py::arg("noise") = 0.08, py::arg("seed") = 0, py::arg("supervision") = 0.05,
      "Returns (points, labels, seed_mask).");
  m.def(
      "knn_graph",
      [](const Array& xy, int k) {
        if (xy.ndim() != 2) throw DimensionError("knn_graph: points must be a 2-D array");
        LabeledPoints pts;
        pts.dim = static_cast<int>(xy.shape(1));
        pts.coords = to_vector(xy);
        return knn_graph(pts, k);
      },
      py::arg("points"), py::arg("k") = 10);

  m.def(
      "maxflow_cut",
      [](const std::string& dimacs_text, const std::string& precond, double tol) {
        const auto net = parse_dimacs_maxflow(dimacs_text);
        const auto inst = maxflow_to_rof(net);
        std::optional<EdgePartition> part;
        Preconditioning pre{PrecondMode::None};
        if (precond != "none" && inst.graph.n_edges() > 0) {
          part.emplace(greedy_nested_forests(inst.graph));
          pre = {PrecondMode::Partition, &*part};
        }
        PdhgOptions o;
        o.tol = tol;
        o.gamma = 0.25;
        const auto r = pdhg_solve(make_rof(inst.graph, inst.f), pre, o);
        py::dict d;
        d["cut"] = threshold_cut_capacity(net, inst, r.u, 0.0);
        d["maxflow"] = maxflow_oracle(net);
        d["symmetric"] = inst.symmetric;
        d["iterations"] = r.stats.iterations;
        return d;
      },
      py::arg("dimacs_text"), py::arg("precond") = "greedy-nested", py::arg("tol") = 1e-10,
      "Minimum cut of a DIMACS max-flow network by thresholding the ROF solution.");
}
