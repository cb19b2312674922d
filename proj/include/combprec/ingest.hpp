#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combprec/graph.hpp"

namespace combprec {

// ---------------------------------------------------------------------------
// Max-flow instances

struct Arc {
  int from = 0;
  int to = 0;
  double capacity = 0.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Directed network with 0-based node ids.
struct FlowNetwork {
  int n_nodes = 0;
  int source = -1;
  int sink = -1;
  std::vector<Arc> arcs;

  friend bool operator==(const FlowNetwork&, const FlowNetwork&) = default;
};

/// DIMACS max-flow text: "c" comments, one "p max N M", "n <id> s|t", "a <u> <v> <cap>".
/// Ids are 1-based in the text. Throws ParseError naming the offending line.
FlowNetwork parse_dimacs_maxflow(std::string_view text);
FlowNetwork read_dimacs_maxflow(const std::string& path);
std::string serialize_dimacs_maxflow(const FlowNetwork& net);

/// ROF instance whose zero level set is a minimum cut of the network.
///
/// Non-terminal nodes become vertices in increasing id order. f_i = cap(s->i) - cap(i->t).
/// Arcs between the same two non-terminals merge into one edge of weight
/// (c_ij + c_ji) / 2, the symmetric part of the capacities; pairs whose total is zero
/// are dropped. `symmetric` is false when some pair had c_ij != c_ji, in which case
/// thresholding solves the symmetrized cut problem rather than the original one.
struct RofInstance {
  WeightedGraph graph;
  std::vector<double> f;
  std::vector<int> vertex_of_node;  // -1 for the terminals
  std::vector<int> node_of_vertex;
  bool symmetric = true;
};
RofInstance maxflow_to_rof(const FlowNetwork& net);

/// Maximum flow value by shortest augmenting paths (Edmonds-Karp).
/// Throws SizeLimitError above `max_arcs` arcs.
double maxflow_oracle(const FlowNetwork& net, int max_arcs = 50000);

/// Total capacity of arcs leaving the source side. `source_side` is per node; the
/// source must be on it and the sink must not.
double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side);

/// Cut of the network induced by {s} and the nodes whose vertex value exceeds `level`.
double threshold_cut_capacity(const FlowNetwork& net, const RofInstance& inst, std::span<const double> u,
                              double level = 0.0);

// ---------------------------------------------------------------------------
// Grids and images

/// Grid graph with extents `dims` (fastest axis first). Vertex (x0, x1, x2) has id
/// x0 + dims[0] * (x1 + dims[1] * x2). Edges are oriented from the lower id and listed
/// axis by axis. Unit weights unless `weights` is given.
WeightedGraph make_grid_graph(std::span<const int> dims, std::vector<double> weights = {});

/// Image with values in [0, 1], rows top to bottom, channels interleaved.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  std::vector<double> data;

  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                    static_cast<std::size_t>(channels) +
                static_cast<std::size_t>(c)];
  }
};

/// PGM/PPM in plain (P2, P3) or binary (P5, P6) form, 8 or 16 bit.
Image parse_pnm(std::string_view bytes);
Image read_pnm(const std::string& path);

/// Binary PGM (P5) of 8-bit gray values, row-major.
void write_pgm(const std::string& path, int width, int height, std::span<const int> values);

/// 4-connected grid over the pixels (id = x + width * y) with
/// w_ij = exp(-xi * ||I_i - I_j||^2).
WeightedGraph image_to_grid(const Image& image, double xi = 0.1);

// ---------------------------------------------------------------------------
// Synthetic data

/// Deterministic generator: mt19937_64 with fixed uniform and normal conversions so
/// streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();               // [0, 1)
  double normal();                // standard normal, Box-Muller
  std::uint64_t below(std::uint64_t n);  // uniform integer in [0, n)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct LabeledPoints {
  int dim = 2;
  std::vector<double> coords;  // n x dim, row-major
  std::vector<int> labels;     // empty when unknown
  std::vector<bool> seed_mask;  // supervised points

  int size() const { return dim > 0 ? static_cast<int>(coords.size()) / dim : 0; }
};

/// Three interleaved unit half circles. Moon k is centred at (1.5 k, 0.4 (k mod 2)) and
/// opens downwards for odd k. `supervision` of each class is marked as seeds.
LabeledPoints three_moons(int n_per_moon, double noise_sd, std::uint64_t seed, double supervision = 0.05);

enum class KnnWeighting { Unit, Gaussian };

/// Symmetrized k-nearest-neighbour graph: i ~ j when either lists the other. Ties in
/// distance go to the lower index. Gaussian weights are exp(-d^2 / (2 sigma^2)).
WeightedGraph knn_graph(const LabeledPoints& points, int k, KnnWeighting weighting = KnnWeighting::Unit,
                        double sigma = 1.0);

/// Channel-major unary costs: a seed with label c gets -penalty on c and +penalty
/// elsewhere, all other points get zero.
std::vector<double> unaries_from_labels(const LabeledPoints& points, int classes, double penalty = 100.0);

/// G(n, m): m distinct uniformly random edges, unit weights, sorted by (tail, head).
WeightedGraph erdos_renyi(int n, int m, std::uint64_t seed);

/// Connected random graph: a random recursive tree plus m - (n - 1) random extra edges.
WeightedGraph random_connected_graph(int n, int m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Text formats

/// "v <n>" followed by "e <i> <j> [w]" lines (0-based, w defaults to 1); '#' starts a comment.
WeightedGraph parse_graph(std::string_view text);
WeightedGraph read_graph(const std::string& path);
std::string serialize_graph(const WeightedGraph& g);

/// Whitespace- or newline-separated reals.
std::vector<double> parse_vector(std::string_view text);
std::vector<double> read_vector(const std::string& path);
std::string serialize_vector(std::span<const double> v);

/// CSV of reals, one row per line; a first line that does not parse as numbers is a header.
std::vector<std::vector<double>> parse_csv_matrix(std::string_view text);
std::vector<std::vector<double>> read_csv_matrix(const std::string& path);

/// Points CSV with columns x, y and an optional integer label column.
LabeledPoints read_points_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace combprec
