#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "combprec/decompose.hpp"
#include "combprec/errors.hpp"
#include "combprec/ingest.hpp"
#include "combprec/pdhg.hpp"
#include "combprec/precond.hpp"

using namespace combprec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kStrategies = {"chains", "greedy-nested", "greedy-linear", "matroid"};
const std::vector<std::string> kPreconds = {"none", "diag", "chains", "greedy-nested", "greedy-linear", "matroid"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      std::size_t used = 0;
      dims.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw std::invalid_argument("--grid expects extents like 5x7 or 4x4x3, got '" + text + "'");
    }
  }
  if (dims.empty() || dims.size() > 3) throw std::invalid_argument("--grid expects one to three extents");
  return dims;
}

EdgePartition build_partition(const WeightedGraph& g, const std::string& strategy, const std::string& grid) {
  if (strategy == "chains") {
    if (grid.empty()) throw std::invalid_argument("strategy 'chains' needs --grid with the grid extents");
    return grid_chains(g, parse_grid(grid));
  }
  if (g.n_edges() == 0) throw std::invalid_argument("graph has no edges to partition");
  if (strategy == "greedy-nested") return greedy_nested_forests(g);
  if (strategy == "greedy-linear") return greedy_linear_forests(g);
  if (strategy == "matroid") return matroid_partition(g);
  throw std::invalid_argument("unknown strategy '" + strategy + "'");
}

json partition_summary(const EdgePartition& part) {
  json parts = json::array();
  for (const auto& p : part.parts()) {
    parts.push_back({{"edges", p.edges.size()}, {"trees", p.n_trees()}, {"forest", true}, {"linear", p.is_linear()}});
  }
  return {{"strategy", part.strategy()},
          {"L", part.n_parts()},
          {"parts", parts},
          {"nested", part.nesting().nested},
          {"l_hat", part.nesting().l_hat}};
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_file(path, j.dump(2) + "\n");
  }
}

struct SolveSetup {
  std::optional<EdgePartition> partition;
  Preconditioning pre;
  double decompose_s = 0.0;
};

// Partition-based modes keep a reference to `g`, which must outlive the result.
SolveSetup make_setup(const WeightedGraph& g, const std::string& precond, const std::string& grid,
                      const std::string& partition_file) {
  SolveSetup s;
  if (precond == "none" || g.n_edges() == 0) {  // nothing to precondition without edges
    s.pre.mode = PrecondMode::None;
  } else if (precond == "diag") {
    s.pre.mode = PrecondMode::Diagonal;
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    if (!partition_file.empty()) {
      s.partition.emplace(partition_from_json(g, read_file(partition_file)));
    } else {
      s.partition.emplace(build_partition(g, precond, grid));
    }
    s.decompose_s = seconds_since(t0);
    s.pre.mode = PrecondMode::Partition;
  }
  return s;
}

std::optional<double> measured_kappa(const WeightedGraph& g, const SolveSetup& s, int dense_limit) {
  if (g.n_edges() == 0 || g.n_vertices() > dense_limit) return std::nullopt;
  SpectralOptions opts;
  opts.dense_limit = dense_limit;
  if (s.pre.mode == PrecondMode::Partition) return condition_number_preconditioned(ForestPreconditioner(*s.partition), opts).kappa;
  if (s.pre.mode == PrecondMode::None) return condition_number_unpreconditioned(g, opts).kappa;
  return std::nullopt;
}

json run_report(const std::string& instance, const WeightedGraph& g, const std::string& precond, const SolveSetup& s,
                const PdhgResult& r, std::optional<double> kappa) {
  json j = {{"instance", instance},
            {"n_vertices", g.n_vertices()},
            {"n_edges", g.n_edges()},
            {"precond", precond},
            {"L", s.partition ? json(s.partition->n_parts()) : json(nullptr)},
            {"kappa", kappa ? json(*kappa) : json(nullptr)},
            {"iterations", r.stats.iterations},
            {"converged", r.stats.converged},
            {"rel_gap", r.stats.gap.rel_gap},
            {"primal", r.stats.gap.primal},
            {"dual", r.stats.gap.dual},
            {"setup_s", s.decompose_s + r.stats.setup_s},
            {"solve_s", r.stats.solve_s}};
  return j;
}

void maybe_write_trace(const std::string& path, const PdhgResult& r) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_trace_csv(os, r.stats.trace);
}

struct SolverFlags {
  std::string precond = "greedy-nested";
  std::string grid;
  std::string partition_file;
  double tol = 1e-10;
  double gamma = 0.0;
  int max_iters = 100000;
  int gap_every = 10;
  bool strict = false;
  std::string trace;
  std::string report;
  bool kappa = false;
  int dense_limit = 2048;

  void add_to(CLI::App* app, double default_tol, double default_gamma) {
    tol = default_tol;
    gamma = default_gamma;
    app->add_option("--precond", precond, "Preconditioner")->check(CLI::IsMember(kPreconds))->capture_default_str();
    app->add_option("--grid", grid, "Grid extents for chains, fastest axis first, e.g. 5x7");
    app->add_option("--partition", partition_file, "Partition JSON from 'decompose' (overrides the strategy)");
    app->add_option("--tol", tol, "Relative primal-dual gap tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--accel-gamma", gamma, "Acceleration modulus, 0 disables")->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--gap-every", gap_every, "Gap evaluation period")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_flag("--strict", strict, "Step sizes strictly above the convergence bound");
    app->add_option("--trace", trace, "Write the gap trace as CSV");
    app->add_option("--report", report, "Write the run report as JSON (default: stdout)");
    app->add_flag("--kappa", kappa, "Measure the condition number for the report");
    app->add_option("--dense-limit", dense_limit, "Largest |V| for dense eigensolves")->capture_default_str();
  }

  PdhgOptions options() const {
    PdhgOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.gamma = gamma;
    o.gap_every = gap_every;
    o.strict = strict;
    return o;
  }
};

// ---------------------------------------------------------------------------

int cmd_decompose(const std::string& graph_file, const std::string& strategy, const std::string& grid,
                  const std::string& out) {
  const auto g = read_graph(graph_file);
  const auto part = build_partition(g, strategy, grid);
  if (!out.empty()) write_file(out, partition_to_json(part));
  write_json("-", partition_summary(part));
  return 0;
}

int cmd_cond(const std::string& graph_file, const std::string& partition_file, const std::string& strategy,
             const std::string& grid, bool lanczos, int dense_limit, const std::string& out) {
  const auto g = read_graph(graph_file);
  if (g.n_edges() == 0) throw std::invalid_argument("graph has no edges");
  SpectralOptions opts;
  opts.dense_limit = dense_limit;
  if (lanczos) opts.mode = EigenMode::Lanczos;
  json j;
  const auto plain = condition_number_unpreconditioned(g, opts);
  j["unpreconditioned"] = {{"kappa", plain.kappa}, {"kappa2", plain.kappa * plain.kappa},
                           {"lambda_max", plain.lambda_max}, {"lambda_min_pos", plain.lambda_min_pos}};
  std::optional<EdgePartition> part;
  if (!partition_file.empty()) {
    part.emplace(partition_from_json(g, read_file(partition_file)));
  } else if (!strategy.empty()) {
    part.emplace(build_partition(g, strategy, grid));
  }
  if (part) {
    const ForestPreconditioner pc(*part);
    const auto rep = condition_number_preconditioned(pc, opts);
    j["partition"] = partition_summary(*part);
    j["preconditioned"] = {{"kappa", rep.kappa}, {"kappa2", rep.kappa * rep.kappa},
                           {"lambda_max", rep.lambda_max}, {"lambda_min_pos", rep.lambda_min_pos}};
    if (part->n_parts() == 2 && g.n_vertices() <= dense_limit) {
      const auto h = check_theorem_hypotheses(pc, dense_limit);
      j["two_part_hypotheses"] = {{"rank_total", h.rank_total},
                                  {"rank_parts", {h.rank_part[0], h.rank_part[1]}},
                                  {"ranges_intersect", h.ranges_intersect},
                                  {"rank_exceeds_min", h.rank_exceeds_min},
                                  {"lower_bound_applies", h.lower_bound_applies},
                                  {"commutator_norm", h.commutator_norm},
                                  {"commute", h.commute},
                                  {"kernel_condition", h.kernel_condition},
                                  {"optimal_applies", h.optimal_applies}};
    }
  }
  write_json(out, j);
  return 0;
}

int cmd_fused_lasso(const std::string& graph_file, const std::string& f_file, const std::string& out,
                    const SolverFlags& flags) {
  const auto g = read_graph(graph_file);
  auto f = read_vector(f_file);
  const auto setup = make_setup(g, flags.precond, flags.grid, flags.partition_file);
  Preconditioning pre = setup.pre;
  if (setup.partition) pre.partition = &*setup.partition;
  const auto r = pdhg_solve(make_rof(g, std::move(f)), pre, flags.options());
  if (!out.empty()) write_file(out, serialize_vector(r.u));
  maybe_write_trace(flags.trace, r);
  const auto kappa = flags.kappa ? measured_kappa(g, setup, flags.dense_limit) : std::nullopt;
  write_json(flags.report, run_report(fs::path(graph_file).filename().string(), g, flags.precond, setup, r, kappa));
  return r.stats.converged ? 0 : 2;
}

int cmd_maxflow_cut(const std::string& dimacs_file, int oracle_limit, const SolverFlags& flags) {
  const auto net = read_dimacs_maxflow(dimacs_file);
  const auto inst = maxflow_to_rof(net);
  if (!inst.symmetric) {
    std::cerr << "warning: " << dimacs_file
              << " has asymmetric capacities between inner nodes; they are averaged, so the cut solves the "
                 "symmetrized problem\n";
  }
  const auto setup = make_setup(inst.graph, flags.precond, flags.grid, flags.partition_file);
  Preconditioning pre = setup.pre;
  if (setup.partition) pre.partition = &*setup.partition;
  const auto r = pdhg_solve(make_rof(inst.graph, inst.f), pre, flags.options());
  maybe_write_trace(flags.trace, r);
  const double cut = threshold_cut_capacity(net, inst, r.u, 0.0);
  const auto kappa = flags.kappa ? measured_kappa(inst.graph, setup, flags.dense_limit) : std::nullopt;
  json j = run_report(fs::path(dimacs_file).filename().string(), inst.graph, flags.precond, setup, r, kappa);
  j["cut"] = cut;
  j["symmetric"] = inst.symmetric;
  if (static_cast<int>(net.arcs.size()) <= oracle_limit) {
    const double flow = maxflow_oracle(net, oracle_limit);
    j["maxflow"] = flow;
    j["oracle_match"] = std::abs(cut - flow) <= 1e-6 * std::max(1.0, std::abs(flow));
  } else {
    j["maxflow"] = nullptr;
    j["oracle_match"] = nullptr;
  }
  write_json(flags.report, j);
  return r.stats.converged ? 0 : 2;
}

struct SegmentFlags {
  std::string image;
  std::string points;
  int moons = 0;
  double moons_noise = 0.08;
  std::uint64_t seed = 42;
  int knn = 10;
  std::string unaries;
  double seeds = -1.0;  // supervised fraction per class; < 0 when unused
  double penalty = 100.0;
  int classes = 3;
  double epsilon = 1.0;
  double xi = 0.1;
  std::string labels_out;
};

int cmd_segment(const SegmentFlags& sf, SolverFlags flags, bool gamma_set) {
  const int sources = (!sf.image.empty()) + (!sf.points.empty()) + (sf.moons > 0);
  if (sources != 1) throw std::invalid_argument("segment: give exactly one of --image, --points, --moons");
  if ((sf.seeds >= 0.0) == !sf.unaries.empty()) throw std::invalid_argument("segment: give exactly one of --unaries, --seeds");
  if (sf.classes < 2) throw std::invalid_argument("segment: --classes must be at least 2");
  if (!gamma_set) flags.gamma = 1.0 / sf.epsilon;

  WeightedGraph g;
  std::optional<Image> image;
  LabeledPoints pts;
  std::string name;
  if (!sf.image.empty()) {
    image = read_pnm(sf.image);
    g = image_to_grid(*image, sf.xi);
    name = fs::path(sf.image).filename().string();
    if (flags.precond == "chains" && flags.grid.empty()) {
      flags.grid = std::to_string(image->width) + "x" + std::to_string(image->height);
    }
  } else {
    if (!sf.points.empty()) {
      pts = read_points_csv(sf.points);
      name = fs::path(sf.points).filename().string();
    } else {
      pts = three_moons(sf.moons, sf.moons_noise, sf.seed, 0.0);
      name = "three-moons";
    }
    g = knn_graph(pts, sf.knn);
  }
  const int n = g.n_vertices();

  std::vector<double> rho;
  if (!sf.unaries.empty()) {
    const auto rows = read_csv_matrix(sf.unaries);
    if (static_cast<int>(rows.size()) != n) {
      throw DimensionError("segment: unaries have " + std::to_string(rows.size()) + " rows for " + std::to_string(n) + " vertices");
    }
    rho.assign(static_cast<std::size_t>(n * sf.classes), 0.0);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != sf.classes) {
        throw DimensionError("segment: unaries row " + std::to_string(i + 1) + " does not have " + std::to_string(sf.classes) + " columns");
      }
      for (int c = 0; c < sf.classes; ++c) rho[static_cast<std::size_t>(c * n + i)] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
  } else {
    if (image) throw std::invalid_argument("segment: images need --unaries");
    if (pts.labels.empty()) throw std::invalid_argument("segment: --seeds needs labelled points");
    // Mark seeds per class exactly as the synthetic generator does.
    Rng rng(sf.seed ^ 0x9e3779b97f4a7c15ull);
    pts.seed_mask.assign(static_cast<std::size_t>(n), false);
    for (int c = 0; c < sf.classes; ++c) {
      std::vector<int> ids;
      for (int i = 0; i < n; ++i) {
        if (pts.labels[static_cast<std::size_t>(i)] == c) ids.push_back(i);
      }
      const int k = static_cast<int>(std::lround(sf.seeds * static_cast<double>(ids.size())));
      for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(ids.size() - static_cast<std::size_t>(i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
        pts.seed_mask[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = true;
      }
    }
    rho = unaries_from_labels(pts, sf.classes, sf.penalty);
  }

  const auto setup = make_setup(g, flags.precond, flags.grid, flags.partition_file);
  Preconditioning pre = setup.pre;
  if (setup.partition) pre.partition = &*setup.partition;
  const auto r = pdhg_solve(make_simplex_entropy(g, sf.classes, std::move(rho), sf.epsilon), pre, flags.options());
  maybe_write_trace(flags.trace, r);

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < sf.classes; ++c) {
      if (r.u[static_cast<std::size_t>(c * n + i)] > r.u[static_cast<std::size_t>(best * n + i)]) best = c;
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  const auto kappa = flags.kappa ? measured_kappa(g, setup, flags.dense_limit) : std::nullopt;
  json j = run_report(name, g, flags.precond, setup, r, kappa);
  j["classes"] = sf.classes;
  if (!image && !pts.labels.empty()) {
    int correct = 0;
    for (int i = 0; i < n; ++i) correct += labels[static_cast<std::size_t>(i)] == pts.labels[static_cast<std::size_t>(i)];
    j["accuracy"] = static_cast<double>(correct) / n;
  }
  if (!sf.labels_out.empty()) {
    if (image) {
      std::vector<int> gray(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) gray[i] = labels[i] * 255 / (sf.classes - 1);
      write_pgm(sf.labels_out, image->width, image->height, gray);
    } else {
      std::string text;
      for (int l : labels) text += std::to_string(l) + "\n";
      write_file(sf.labels_out, text);
    }
  }
  write_json(flags.report, j);
  return r.stats.converged ? 0 : 2;
}

// ---------------------------------------------------------------------------

struct BenchRow {
  std::string instance;
  int n = 0, m = 0;
  std::string precond;
  std::string L, kappa2, iterations, rel_gap, converged, setup_s, solve_s;
  std::string status = "ok";
};

std::vector<BenchRow> bench_instance(const fs::path& path, const std::vector<std::string>& modes, double tol,
                                     double gamma, int max_iters, int dense_limit) {
  std::vector<BenchRow> rows;
  WeightedGraph g;
  std::vector<double> f;
  try {
    if (path.extension() == ".max") {
      auto inst = maxflow_to_rof(read_dimacs_maxflow(path.string()));
      g = std::move(inst.graph);
      f = std::move(inst.f);
    } else {
      g = read_graph(path.string());
      const auto fpath = fs::path(path).replace_extension(".f");
      if (fs::exists(fpath)) {
        f = read_vector(fpath.string());
      } else {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a of the file name, stable across platforms
        for (unsigned char c : path.filename().string()) h = (h ^ c) * 1099511628211ull;
        Rng rng(h);
        f.resize(static_cast<std::size_t>(g.n_vertices()));
        for (auto& x : f) x = rng.normal();
      }
    }
  } catch (const std::exception& e) {
    BenchRow row;
    row.instance = path.filename().string();
    row.precond = "-";
    row.status = std::string("error: ") + e.what();
    rows.push_back(row);
    return rows;
  }
  auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
  };
  for (const auto& mode : modes) {
    BenchRow row;
    row.instance = path.filename().string();
    row.n = g.n_vertices();
    row.m = g.n_edges();
    row.precond = mode;
    try {
      if (mode == "chains") throw std::invalid_argument("chains needs grid extents; not available in bench");
      const auto setup = make_setup(g, mode, "", "");
      Preconditioning pre = setup.pre;
      if (setup.partition) pre.partition = &*setup.partition;
      PdhgOptions opts;
      opts.tol = tol;
      opts.gamma = gamma;
      opts.max_iters = max_iters;
      opts.gap_every = 1;
      const auto r = pdhg_solve(make_rof(g, f), pre, opts);
      if (setup.partition) row.L = std::to_string(setup.partition->n_parts());
      if (const auto k = measured_kappa(g, setup, dense_limit)) row.kappa2 = fmt(*k * *k);
      row.iterations = std::to_string(r.stats.iterations);
      row.rel_gap = fmt(r.stats.gap.rel_gap);
      row.converged = r.stats.converged ? "true" : "false";
      row.setup_s = fmt(setup.decompose_s + r.stats.setup_s);
      row.solve_s = fmt(r.stats.solve_s);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int cmd_bench(const std::string& dir, std::vector<std::string> modes, double tol, double gamma, int max_iters,
              int dense_limit, int jobs, const std::string& out) {
  if (!fs::is_directory(dir)) throw std::invalid_argument("bench: '" + dir + "' is not a directory");
  if (modes.size() == 1 && modes[0] == "all") modes = {"none", "diag", "greedy-linear", "greedy-nested", "matroid"};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".graph" || ext == ".max")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<BenchRow>> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      results[i] = bench_instance(files[i], modes, tol, gamma, max_iters, dense_limit);
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "instance,n_vertices,n_edges,precond,L,kappa2,iterations,rel_gap,converged,setup_s,solve_s,status\n";
  for (const auto& rows : results) {
    for (const auto& r : rows) {
      os << csv_escape(r.instance) << ',' << r.n << ',' << r.m << ',' << r.precond << ',' << r.L << ',' << r.kappa2
         << ',' << r.iterations << ',' << r.rel_gap << ',' << r.converged << ',' << r.setup_s << ',' << r.solve_s
         << ',' << csv_escape(r.status) << '\n';
    }
  }
  if (out.empty() || out == "-") {
    std::cout << os.str();
  } else {
    write_file(out, os.str());
  }
  return 0;
}

int cmd_generate(const std::string& kind, int n, int m, const std::vector<int>& dims, std::uint64_t seed,
                 double noise, const std::string& out) {
  if (kind == "er") {
    write_file(out, serialize_graph(erdos_renyi(n, m, seed)));
  } else if (kind == "connected") {
    write_file(out, serialize_graph(random_connected_graph(n, m, seed)));
  } else if (kind == "grid") {
    if (dims.empty()) throw std::invalid_argument("generate grid needs --dims");
    write_file(out, serialize_graph(make_grid_graph(dims)));
  } else if (kind == "moons") {
    const auto pts = three_moons(n, noise, seed, 0.0);
    std::ostringstream os;
    os.precision(17);
    os << "x,y,label\n";
    for (int i = 0; i < pts.size(); ++i) {
      os << pts.coords[static_cast<std::size_t>(2 * i)] << ',' << pts.coords[static_cast<std::size_t>(2 * i + 1)] << ','
         << pts.labels[static_cast<std::size_t>(i)] << '\n';
    }
    write_file(out, os.str());
  } else {
    throw std::invalid_argument("unknown generator '" + kind + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial preconditioners for PDHG on graphs"};
  app.require_subcommand(1);
  int rc = 0;

  // decompose
  auto* dec = app.add_subcommand("decompose", "Split the edges of a graph into forests");
  std::string dec_graph, dec_strategy = "greedy-nested", dec_grid, dec_out;
  dec->add_option("graph", dec_graph, "Graph file")->required()->check(CLI::ExistingFile);
  dec->add_option("--strategy", dec_strategy, "Decomposition strategy")->check(CLI::IsMember(kStrategies))->capture_default_str();
  dec->add_option("--grid", dec_grid, "Grid extents for chains, e.g. 5x7");
  dec->add_option("--out", dec_out, "Write the partition JSON here");
  dec->callback([&] { rc = cmd_decompose(dec_graph, dec_strategy, dec_grid, dec_out); });

  // cond
  auto* cond = app.add_subcommand("cond", "Condition numbers with and without a forest preconditioner");
  std::string cond_graph, cond_part, cond_strategy, cond_grid, cond_out;
  bool cond_lanczos = false;
  int cond_dense = 4096;
  cond->add_option("graph", cond_graph, "Graph file")->required()->check(CLI::ExistingFile);
  cond->add_option("partition", cond_part, "Partition JSON")->check(CLI::ExistingFile);
  cond->add_option("--strategy", cond_strategy, "Build the partition instead of reading it")->check(CLI::IsMember(kStrategies));
  cond->add_option("--grid", cond_grid, "Grid extents for chains");
  cond->add_flag("--lanczos", cond_lanczos, "Use Lanczos instead of a dense eigensolve");
  cond->add_option("--dense-limit", cond_dense, "Largest |V| for dense eigensolves")->capture_default_str();
  cond->add_option("--out", cond_out, "Write JSON here (default: stdout)");
  cond->callback([&] { rc = cmd_cond(cond_graph, cond_part, cond_strategy, cond_grid, cond_lanczos, cond_dense, cond_out); });

  // fused-lasso
  auto* fl = app.add_subcommand("fused-lasso", "Solve 1/2 ||u - f||^2 + ||K u||_1");
  std::string fl_graph, fl_f, fl_out;
  SolverFlags fl_flags;
  fl->add_option("graph", fl_graph, "Graph file")->required()->check(CLI::ExistingFile);
  fl->add_option("f", fl_f, "Data vector file")->required()->check(CLI::ExistingFile);
  fl->add_option("--out", fl_out, "Write the solution u here");
  fl_flags.add_to(fl, 1e-10, 0.25);
  fl->callback([&] { rc = cmd_fused_lasso(fl_graph, fl_f, fl_out, fl_flags); });

  // maxflow-cut
  auto* mf = app.add_subcommand("maxflow-cut", "Minimum cut of a DIMACS network by thresholding the ROF solution");
  std::string mf_file;
  int mf_oracle = 50000;
  SolverFlags mf_flags;
  mf->add_option("dimacs", mf_file, "DIMACS max-flow file")->required()->check(CLI::ExistingFile);
  mf->add_option("--oracle-limit", mf_oracle, "Largest arc count for the Edmonds-Karp cross-check")->capture_default_str();
  mf_flags.add_to(mf, 1e-10, 0.25);
  mf->callback([&] { rc = cmd_maxflow_cut(mf_file, mf_oracle, mf_flags); });

  // segment
  auto* seg = app.add_subcommand("segment", "Multi-class segmentation on the simplex with entropic smoothing");
  SegmentFlags sf;
  SolverFlags seg_flags;
  seg->add_option("--image", sf.image, "PPM/PGM image")->check(CLI::ExistingFile);
  seg->add_option("--points", sf.points, "Points CSV with x, y[, label]")->check(CLI::ExistingFile);
  seg->add_option("--moons", sf.moons, "Generate three moons with this many points each");
  seg->add_option("--moons-noise", sf.moons_noise, "Noise of the generated moons")->capture_default_str();
  seg->add_option("--seed", sf.seed, "Seed for generated data and seed selection")->capture_default_str();
  seg->add_option("--knn", sf.knn, "Neighbours in the kNN graph")->capture_default_str();
  seg->add_option("--unaries", sf.unaries, "CSV with one row of C unary costs per vertex")->check(CLI::ExistingFile);
  seg->add_option("--seeds", sf.seeds, "Fraction of labelled points per class used as seeds")->check(CLI::Range(0.0, 1.0));
  seg->add_option("--penalty", sf.penalty, "Seed unary magnitude")->capture_default_str();
  seg->add_option("--classes", sf.classes, "Number of classes")->capture_default_str();
  seg->add_option("--epsilon", sf.epsilon, "Entropy weight")->check(CLI::PositiveNumber)->capture_default_str();
  seg->add_option("--xi", sf.xi, "Image edge weight scale")->capture_default_str();
  seg->add_option("--labels-out", sf.labels_out, "Write labels (PGM for images, text otherwise)");
  seg_flags.add_to(seg, 5e-4, 0.0);
  seg->callback([&] { rc = cmd_segment(sf, seg_flags, seg->count("--accel-gamma") > 0); });

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark every instance in a directory");
  std::string bench_dir, bench_out;
  std::vector<std::string> bench_modes{"all"};
  double bench_tol = 1e-12, bench_gamma = 0.25;
  int bench_iters = 200000, bench_dense = 2048, bench_jobs = 1;
  bench->add_option("dir", bench_dir, "Directory with .graph (optional .f) and .max files")->required();
  bench->add_option("--strategies", bench_modes, "Modes to run, or 'all'")->delimiter(',');
  bench->add_option("--tol", bench_tol, "Relative gap tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--accel-gamma", bench_gamma, "Acceleration modulus")->capture_default_str();
  bench->add_option("--max-iters", bench_iters, "Iteration cap")->capture_default_str();
  bench->add_option("--dense-limit", bench_dense, "Largest |V| for the kappa column")->capture_default_str();
  bench->add_option("--jobs", bench_jobs, "Instances solved in parallel")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output (default: stdout)");
  bench->callback([&] {
    for (const auto& m : bench_modes) {
      if (m != "all" && std::find(kPreconds.begin(), kPreconds.end(), m) == kPreconds.end()) {
        throw std::invalid_argument("bench: unknown mode '" + m + "'");
      }
    }
    rc = cmd_bench(bench_dir, bench_modes, bench_tol, bench_gamma, bench_iters, bench_dense, bench_jobs, bench_out);
  });

  // generate
  auto* gen = app.add_subcommand("generate", "Write synthetic instances");
  std::string gen_kind, gen_out;
  int gen_n = 512, gen_m = 1024;
  std::vector<int> gen_dims;
  std::uint64_t gen_seed = 1;
  double gen_noise = 0.08;
  gen->add_option("kind", gen_kind, "er | connected | grid | moons")->required()->check(CLI::IsMember({"er", "connected", "grid", "moons"}));
  gen->add_option("--n", gen_n, "Vertices (points per moon for moons)")->capture_default_str();
  gen->add_option("--m", gen_m, "Edges")->capture_default_str();
  gen->add_option("--dims", gen_dims, "Grid extents")->delimiter('x');
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--noise", gen_noise, "Noise for moons")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file")->required();
  gen->callback([&] { rc = cmd_generate(gen_kind, gen_n, gen_m, gen_dims, gen_seed, gen_noise, gen_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
