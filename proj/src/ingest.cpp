#include "combprec/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "combprec/errors.hpp"

namespace combprec {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

// Calls fn(line_number, line) for every line, without the trailing '\r'.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!(end == text.size() && line.empty())) fn(line_no, line);
    pos = end + 1;
  }
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

FlowNetwork parse_dimacs_maxflow(std::string_view text) {
  FlowNetwork net;
  bool have_problem = false;
  long long declared_arcs = 0;
  std::size_t problem_line = 0;
  for_each_line(text, [&](std::size_t ln, std::string_view line) {
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c") return;
    if (tok[0] == "p") {
      if (have_problem) throw ParseError("duplicate problem line", ln);
      if (tok.size() != 4 || tok[1] != "max") throw ParseError("problem line must read 'p max <nodes> <arcs>'", ln);
      if (!parse_number(tok[2], net.n_nodes) || net.n_nodes < 2) throw ParseError("invalid node count", ln);
      if (!parse_number(tok[3], declared_arcs) || declared_arcs < 0) throw ParseError("invalid arc count", ln);
      have_problem = true;
      problem_line = ln;
      net.arcs.reserve(static_cast<std::size_t>(std::min<long long>(declared_arcs, 1 << 24)));
      return;
    }
    if (!have_problem) throw ParseError("'" + std::string(tok[0]) + "' line before the problem line", ln);
    auto node_id = [&](std::string_view s, const char* what) {
      int id = 0;
      if (!parse_number(s, id)) throw ParseError(std::string("malformed ") + what + " id '" + std::string(s) + "'", ln);
      if (id < 1 || id > net.n_nodes) {
        throw ParseError(std::string(what) + " id " + std::to_string(id) + " outside 1.." + std::to_string(net.n_nodes), ln);
      }
      return id - 1;
    };
    if (tok[0] == "n") {
      if (tok.size() != 3) throw ParseError("node line must read 'n <id> s|t'", ln);
      const int id = node_id(tok[1], "node");
      if (tok[2] == "s") {
        if (net.source >= 0) throw ParseError("duplicate source declaration", ln);
        net.source = id;
      } else if (tok[2] == "t") {
        if (net.sink >= 0) throw ParseError("duplicate sink declaration", ln);
        net.sink = id;
      } else {
        throw ParseError("node designator must be 's' or 't', got '" + std::string(tok[2]) + "'", ln);
      }
      return;
    }
    if (tok[0] == "a") {
      if (tok.size() != 4) throw ParseError("malformed arc: expected 'a <u> <v> <cap>'", ln);
      Arc a;
      a.from = node_id(tok[1], "arc tail");
      a.to = node_id(tok[2], "arc head");
      if (!parse_number(tok[3], a.capacity) || !std::isfinite(a.capacity)) {
        throw ParseError("malformed arc capacity '" + std::string(tok[3]) + "'", ln);
      }
      if (a.capacity < 0.0) throw ParseError("negative arc capacity", ln);
      net.arcs.push_back(a);
      return;
    }
    throw ParseError("unknown line type '" + std::string(tok[0]) + "'", ln);
  });
  if (!have_problem) throw ParseError("missing problem line 'p max <nodes> <arcs>'", 0);
  if (static_cast<long long>(net.arcs.size()) != declared_arcs) {
    throw ParseError("arc count mismatch: problem line declares " + std::to_string(declared_arcs) + " arcs but " +
                         std::to_string(net.arcs.size()) + " were found",
                     problem_line);
  }
  if (net.source < 0) throw ParseError("no source declared", 0);
  if (net.sink < 0) throw ParseError("no sink declared", 0);
  if (net.source == net.sink) throw ParseError("source and sink coincide", 0);
  return net;
}

FlowNetwork read_dimacs_maxflow(const std::string& path) { return parse_dimacs_maxflow(read_file(path)); }

std::string serialize_dimacs_maxflow(const FlowNetwork& net) {
  std::string out;
  out += "p max " + std::to_string(net.n_nodes) + " " + std::to_string(net.arcs.size()) + "\n";
  out += "n " + std::to_string(net.source + 1) + " s\n";
  out += "n " + std::to_string(net.sink + 1) + " t\n";
  for (const Arc& a : net.arcs) {
    out += "a " + std::to_string(a.from + 1) + " " + std::to_string(a.to + 1) + " " + format_double(a.capacity) + "\n";
  }
  return out;
}

RofInstance maxflow_to_rof(const FlowNetwork& net) {
  RofInstance inst;
  inst.vertex_of_node.assign(idx(net.n_nodes), -1);
  for (int v = 0; v < net.n_nodes; ++v) {
    if (v == net.source || v == net.sink) continue;
    inst.vertex_of_node[idx(v)] = static_cast<int>(inst.node_of_vertex.size());
    inst.node_of_vertex.push_back(v);
  }
  const int n = static_cast<int>(inst.node_of_vertex.size());
  inst.f.assign(idx(n), 0.0);
  // Capacities per unordered pair (a < b): first = a->b, second = b->a.
  std::map<std::pair<int, int>, std::pair<double, double>> pairs;
  for (const Arc& arc : net.arcs) {
    const int a = inst.vertex_of_node[idx(arc.from)];
    const int b = inst.vertex_of_node[idx(arc.to)];
    if (arc.from == net.source && b >= 0) inst.f[idx(b)] += arc.capacity;
    else if (arc.to == net.sink && a >= 0) inst.f[idx(a)] -= arc.capacity;
    else if (a >= 0 && b >= 0 && a != b) {
      auto& caps = pairs[{std::min(a, b), std::max(a, b)}];
      (a < b ? caps.first : caps.second) += arc.capacity;
    }
  }
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (const auto& [key, caps] : pairs) {
    if (caps.first != caps.second) inst.symmetric = false;
    const double w = 0.5 * (caps.first + caps.second);
    if (w > 0.0) {
      edges.push_back({key.first, key.second});
      weights.push_back(w);
    }
  }
  inst.graph = WeightedGraph(n, std::move(edges), std::move(weights));
  return inst;
}

double maxflow_oracle(const FlowNetwork& net, int max_arcs) {
  if (static_cast<long long>(net.arcs.size()) > max_arcs) {
    throw SizeLimitError("maxflow_oracle: " + std::to_string(net.arcs.size()) + " arcs exceed the cap of " +
                         std::to_string(max_arcs));
  }
  struct R {
    int to;
    double cap;
  };
  std::vector<R> res;
  std::vector<std::vector<int>> adj(idx(net.n_nodes));
  for (const Arc& a : net.arcs) {
    if (a.from == a.to) continue;
    adj[idx(a.from)].push_back(static_cast<int>(res.size()));
    res.push_back({a.to, a.capacity});
    adj[idx(a.to)].push_back(static_cast<int>(res.size()));
    res.push_back({a.from, 0.0});
  }
  double flow = 0.0;
  std::vector<int> pred(idx(net.n_nodes));
  for (;;) {
    std::fill(pred.begin(), pred.end(), -1);
    std::deque<int> queue{net.source};
    pred[idx(net.source)] = -2;
    while (!queue.empty() && pred[idx(net.sink)] == -1) {
      const int v = queue.front();
      queue.pop_front();
      for (int r : adj[idx(v)]) {
        const int w = res[idx(r)].to;
        if (pred[idx(w)] == -1 && res[idx(r)].cap > 0.0) {
          pred[idx(w)] = r;
          queue.push_back(w);
        }
      }
    }
    if (pred[idx(net.sink)] == -1) break;
    double aug = std::numeric_limits<double>::infinity();
    for (int v = net.sink; v != net.source; v = res[idx(pred[idx(v)] ^ 1)].to) aug = std::min(aug, res[idx(pred[idx(v)])].cap);
    for (int v = net.sink; v != net.source; v = res[idx(pred[idx(v)] ^ 1)].to) {
      res[idx(pred[idx(v)])].cap -= aug;
      res[idx(pred[idx(v)] ^ 1)].cap += aug;
    }
    flow += aug;
  }
  return flow;
}

double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side) {
  if (source_side.size() != idx(net.n_nodes)) throw DimensionError("cut_capacity: one flag per node expected");
  if (!source_side[idx(net.source)] || source_side[idx(net.sink)]) {
    throw std::invalid_argument("cut_capacity: the source must be on the source side and the sink must not");
  }
  double value = 0.0;
  for (const Arc& a : net.arcs) {
    if (source_side[idx(a.from)] && !source_side[idx(a.to)]) value += a.capacity;
  }
  return value;
}

double threshold_cut_capacity(const FlowNetwork& net, const RofInstance& inst, std::span<const double> u,
                              double level) {
  if (u.size() != inst.node_of_vertex.size()) throw DimensionError("threshold_cut_capacity: length mismatch");
  std::vector<bool> side(idx(net.n_nodes), false);
  side[idx(net.source)] = true;
  for (std::size_t i = 0; i < u.size(); ++i) side[idx(inst.node_of_vertex[i])] = u[i] > level;
  return cut_capacity(net, side);
}

// ---------------------------------------------------------------------------

WeightedGraph make_grid_graph(std::span<const int> dims, std::vector<double> weights) {
  if (dims.empty() || dims.size() > 3) throw std::invalid_argument("make_grid_graph: expected 1 to 3 dimensions");
  int n = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("make_grid_graph: extents must be positive");
    n *= d;
  }
  int stride = 1;
  std::vector<Edge> edges;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const int d = dims[axis];
    for (int v = 0; v < n; ++v) {
      if ((v / stride) % d + 1 < d) edges.push_back({v, v + stride});
    }
    stride *= d;
  }
  if (weights.empty()) weights.assign(edges.size(), 1.0);
  return WeightedGraph(n, std::move(edges), std::move(weights));
}

Image parse_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto next_int = [&](const char* what) {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    int v = 0;
    if (start == pos || !parse_number(bytes.substr(start, pos - start), v)) {
      throw ParseError(std::string("pnm: expected ") + what, 0);
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("pnm: missing magic number", 0);
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') throw ParseError("pnm: only P2, P3, P5 and P6 are supported", 0);
  pos = 2;
  Image img;
  img.width = next_int("width");
  img.height = next_int("height");
  const int maxval = next_int("maxval");
  if (img.width < 1 || img.height < 1) throw ParseError("pnm: empty image", 0);
  if (maxval < 1 || maxval > 65535) throw ParseError("pnm: maxval must lie in 1..65535", 0);
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  const std::size_t count = idx(img.width) * idx(img.height) * idx(img.channels);
  img.data.resize(count);
  const double scale = 1.0 / maxval;
  if (kind == '2' || kind == '3') {
    for (std::size_t i = 0; i < count; ++i) {
      const int v = next_int("sample");
      if (v > maxval) throw ParseError("pnm: sample exceeds maxval", 0);
      img.data[i] = v * scale;
    }
  } else {
    ++pos;  // single whitespace after maxval
    const std::size_t bps = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + count * bps) throw ParseError("pnm: truncated pixel data", 0);
    for (std::size_t i = 0; i < count; ++i) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * bps);
      const int v = bps == 1 ? p[0] : (p[0] << 8) | p[1];
      img.data[i] = std::min(v, maxval) * scale;
    }
  }
  return img;
}

Image read_pnm(const std::string& path) { return parse_pnm(read_file(path)); }

void write_pgm(const std::string& path, int width, int height, std::span<const int> values) {
  if (width < 1 || height < 1 || values.size() != idx(width) * idx(height)) {
    throw DimensionError("write_pgm: value count does not match the image size");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (int v : values) out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0, 255))));
  write_file(path, out);
}

WeightedGraph image_to_grid(const Image& image, double xi) {
  if (image.width < 1 || image.height < 1 || image.data.empty()) throw std::invalid_argument("image_to_grid: empty image");
  if (xi < 0.0) throw std::invalid_argument("image_to_grid: xi must be nonnegative");
  const int dims[2] = {image.width, image.height};
  WeightedGraph grid = make_grid_graph(dims);
  std::vector<double> w(idx(grid.n_edges()));
  for (EdgeId e = 0; e < grid.n_edges(); ++e) {
    const Edge& ed = grid.edge(e);
    double d2 = 0.0;
    for (int c = 0; c < image.channels; ++c) {
      const double diff = image.at(ed.tail % image.width, ed.tail / image.width, c) -
                          image.at(ed.head % image.width, ed.head / image.width, c);
      d2 += diff * diff;
    }
    w[idx(e)] = std::exp(-xi * d2);
  }
  std::vector<Edge> edges(grid.edges().begin(), grid.edges().end());
  return WeightedGraph(grid.n_vertices(), std::move(edges), std::move(w));
}

// ---------------------------------------------------------------------------

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

LabeledPoints three_moons(int n_per_moon, double noise_sd, std::uint64_t seed, double supervision) {
  if (n_per_moon < 1) throw std::invalid_argument("three_moons: n_per_moon must be positive");
  if (noise_sd < 0.0) throw std::invalid_argument("three_moons: noise_sd must be nonnegative");
  if (supervision < 0.0 || supervision > 1.0) throw std::invalid_argument("three_moons: supervision must lie in [0, 1]");
  Rng rng(seed);
  LabeledPoints pts;
  pts.dim = 2;
  const int n = 3 * n_per_moon;
  pts.coords.reserve(idx(2 * n));
  for (int k = 0; k < 3; ++k) {
    const double cx = 1.5 * k;
    const double cy = (k % 2) ? 0.4 : 0.0;
    const double dir = (k % 2) ? -1.0 : 1.0;
    for (int i = 0; i < n_per_moon; ++i) {
      const double phi = std::numbers::pi * rng.uniform();
      const double nx = noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0;
      const double ny = noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0;
      pts.coords.push_back(cx + std::cos(phi) + nx);
      pts.coords.push_back(cy + dir * std::sin(phi) + ny);
      pts.labels.push_back(k);
    }
  }
  pts.seed_mask.assign(idx(n), false);
  const int per_class = static_cast<int>(std::lround(supervision * n_per_moon));
  for (int k = 0; k < 3; ++k) {
    std::vector<int> ids(idx(n_per_moon));
    for (int i = 0; i < n_per_moon; ++i) ids[idx(i)] = k * n_per_moon + i;
    for (int i = 0; i < per_class; ++i) {  // partial Fisher-Yates
      const auto j = idx(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_per_moon - i)));
      std::swap(ids[idx(i)], ids[j]);
      pts.seed_mask[idx(ids[idx(i)])] = true;
    }
  }
  return pts;
}

WeightedGraph knn_graph(const LabeledPoints& points, int k, KnnWeighting weighting, double sigma) {
  const int n = points.size();
  if (k < 1 || k >= n) throw std::invalid_argument("knn_graph: need 1 <= k < number of points");
  if (weighting == KnnWeighting::Gaussian && !(sigma > 0.0)) throw std::invalid_argument("knn_graph: sigma must be positive");
  const auto d = idx(points.dim);
  auto dist2 = [&](int a, int b) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double x = points.coords[idx(a) * d + c] - points.coords[idx(b) * d + c];
      s += x * x;
    }
    return s;
  };
  std::map<std::pair<int, int>, double> adj;
  std::vector<std::pair<double, int>> cand(idx(n - 1));
  for (int i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) cand[c++] = {dist2(i, j), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int r = 0; r < k; ++r) adj[{std::min(i, cand[idx(r)].second), std::max(i, cand[idx(r)].second)}] = cand[idx(r)].first;
  }
  std::vector<Edge> edges;
  std::vector<double> w;
  edges.reserve(adj.size());
  for (const auto& [key, d2] : adj) {
    edges.push_back({key.first, key.second});
    w.push_back(weighting == KnnWeighting::Unit ? 1.0 : std::max(std::exp(-d2 / (2.0 * sigma * sigma)), 1e-300));
  }
  return WeightedGraph(n, std::move(edges), std::move(w));
}

std::vector<double> unaries_from_labels(const LabeledPoints& points, int classes, double penalty) {
  if (classes < 1) throw std::invalid_argument("unaries_from_labels: classes must be positive");
  const int n = points.size();
  std::vector<double> rho(idx(n) * idx(classes), 0.0);
  for (int i = 0; i < n; ++i) {
    if (idx(i) >= points.seed_mask.size() || !points.seed_mask[idx(i)]) continue;
    if (idx(i) >= points.labels.size()) throw std::invalid_argument("unaries_from_labels: seed without a label");
    const int label = points.labels[idx(i)];
    if (label < 0 || label >= classes) {
      throw std::invalid_argument("unaries_from_labels: label " + std::to_string(label) + " out of range");
    }
    for (int c = 0; c < classes; ++c) rho[idx(c) * idx(n) + idx(i)] = c == label ? -penalty : penalty;
  }
  return rho;
}

WeightedGraph erdos_renyi(int n, int m, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("erdos_renyi: need at least two vertices");
  const long long max_m = static_cast<long long>(n) * (n - 1) / 2;
  if (m < 0 || m > max_m) throw std::invalid_argument("erdos_renyi: edge count out of range");
  Rng rng(seed);
  std::set<std::pair<int, int>> chosen;
  while (static_cast<int>(chosen.size()) < m) {
    const int a = static_cast<int>(rng.below(idx(n)));
    const int b = static_cast<int>(rng.below(idx(n)));
    if (a != b) chosen.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : chosen) edges.push_back({a, b});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph random_connected_graph(int n, int m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_connected_graph: need at least one vertex");
  const long long max_m = static_cast<long long>(n) * (n - 1) / 2;
  if (m < n - 1 || m > max_m) throw std::invalid_argument("random_connected_graph: edge count out of range");
  Rng rng(seed);
  std::set<std::pair<int, int>> chosen;
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.below(idx(v)));
    chosen.insert({u, v});
  }
  while (static_cast<int>(chosen.size()) < m) {
    const int a = static_cast<int>(rng.below(idx(n)));
    const int b = static_cast<int>(rng.below(idx(n)));
    if (a != b) chosen.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : chosen) edges.push_back({a, b});
  return WeightedGraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------

WeightedGraph parse_graph(std::string_view text) {
  int n = -1;
  std::vector<Edge> edges;
  std::vector<double> weights;
  for_each_line(text, [&](std::size_t ln, std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) return;
    if (tok[0] == "v") {
      if (n >= 0) throw ParseError("duplicate vertex count line", ln);
      if (tok.size() != 2 || !parse_number(tok[1], n) || n < 1) throw ParseError("expected 'v <n>' with n >= 1", ln);
      return;
    }
    if (tok[0] == "e") {
      if (n < 0) throw ParseError("edge before the 'v <n>' line", ln);
      if (tok.size() != 3 && tok.size() != 4) throw ParseError("expected 'e <i> <j> [w]'", ln);
      Edge e{};
      double w = 1.0;
      if (!parse_number(tok[1], e.tail) || !parse_number(tok[2], e.head)) throw ParseError("malformed vertex id", ln);
      if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n) throw ParseError("vertex id out of range", ln);
      if (e.tail == e.head) throw ParseError("self-loop", ln);
      if (tok.size() == 4 && (!parse_number(tok[3], w) || !(w > 0.0) || !std::isfinite(w))) {
        throw ParseError("edge weight must be a positive number", ln);
      }
      edges.push_back(e);
      weights.push_back(w);
      return;
    }
    throw ParseError("unknown line type '" + std::string(tok[0]) + "'", ln);
  });
  if (n < 0) throw ParseError("missing 'v <n>' line", 0);
  return WeightedGraph(n, std::move(edges), std::move(weights));
}

WeightedGraph read_graph(const std::string& path) { return parse_graph(read_file(path)); }

std::string serialize_graph(const WeightedGraph& g) {
  std::string out = "v " + std::to_string(g.n_vertices()) + "\n";
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    out += "e " + std::to_string(g.edge(e).tail) + " " + std::to_string(g.edge(e).head) + " " +
           format_double(g.weight(e)) + "\n";
  }
  return out;
}

std::vector<double> parse_vector(std::string_view text) {
  std::vector<double> v;
  for_each_line(text, [&](std::size_t ln, std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto tok : split_ws(line)) {
      double x = 0.0;
      if (!parse_number(tok, x)) throw ParseError("malformed number '" + std::string(tok) + "'", ln);
      v.push_back(x);
    }
  });
  return v;
}

std::vector<double> read_vector(const std::string& path) { return parse_vector(read_file(path)); }

std::string serialize_vector(std::span<const double> v) {
  std::string out;
  for (double x : v) out += format_double(x) + "\n";
  return out;
}

std::vector<std::vector<double>> parse_csv_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::size_t ln, std::string_view line) {
    if (split_ws(line).empty()) return;
    std::vector<double> row;
    bool ok = true;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string_view::npos) end = line.size();
      auto cell = line.substr(pos, end - pos);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
      double x = 0.0;
      if (!parse_number(cell, x)) ok = false;
      row.push_back(x);
      pos = end + 1;
    }
    if (!ok) {
      if (ln == 1 && rows.empty()) return;  // header
      throw ParseError("malformed CSV row", ln);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("CSV row length differs from the first row", ln);
    rows.push_back(std::move(row));
  });
  return rows;
}

std::vector<std::vector<double>> read_csv_matrix(const std::string& path) { return parse_csv_matrix(read_file(path)); }

LabeledPoints read_points_csv(const std::string& path) {
  const auto rows = read_csv_matrix(path);
  if (rows.empty()) throw ParseError("points CSV is empty", 0);
  const std::size_t cols = rows.front().size();
  if (cols != 2 && cols != 3) throw ParseError("points CSV needs columns x,y or x,y,label", 0);
  LabeledPoints pts;
  pts.dim = 2;
  for (const auto& r : rows) {
    pts.coords.push_back(r[0]);
    pts.coords.push_back(r[1]);
    if (cols == 3) {
      if (r[2] != std::floor(r[2])) throw ParseError("point label must be an integer", 0);
      pts.labels.push_back(static_cast<int>(r[2]));
    }
  }
  pts.seed_mask.assign(rows.size(), false);
  return pts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace combprec
