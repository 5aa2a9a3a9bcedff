#include "perclab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "perclab/kernels.hpp"
#include "perclab/metric.hpp"

namespace perclab {

PercolationSample sample_weights(const FiniteGraph& g, std::uint64_t seed, std::uint64_t trial) {
  PercolationSample s;
  s.graph = &g;
  s.weights.resize(g.edge_count());
  resample(s, seed, trial);
  return s;
}

void resample(PercolationSample& sample, std::uint64_t seed, std::uint64_t trial) {
  sample.key = StreamKey{seed, trial, Stream::kEdgeWeights};
  kernels::fill_uniform(sample.key, 0, sample.weights);
}

std::size_t Config::open_count() const {
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), std::uint8_t{1}));
}

Config Config::all(const FiniteGraph& g, bool is_open) {
  Config c;
  c.open.assign(g.edge_count(), is_open ? 1 : 0);
  return c;
}

Config Config::from_edge_ids(const FiniteGraph& g, std::span<const EdgeId> open_ids) {
  Config c = all(g, false);
  for (auto id : open_ids) {
    if (id >= g.edge_count()) throw std::invalid_argument("edge id out of range");
    c.open[id] = 1;
  }
  return c;
}

Config Config::from_pairs(const FiniteGraph& g, std::span<const Edge> open_pairs) {
  Config c = all(g, false);
  for (const auto& e : open_pairs) {
    auto id = g.edge_id(e.u, e.v);
    if (!id) {
      throw std::invalid_argument("(" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") is not an edge");
    }
    c.open[*id] = 1;
  }
  return c;
}

void config_at(const PercolationSample& sample, double p, Config& out) {
  p = std::clamp(p, 0.0, 1.0);
  out.p = p;
  out.open.resize(sample.weights.size());
  if (p <= 0.0) {
    std::fill(out.open.begin(), out.open.end(), std::uint8_t{0});
    return;
  }
  kernels::threshold_le(sample.weights, p, out.open);
}

Config config_at(const PercolationSample& sample, double p) {
  Config c;
  config_at(sample, p, c);
  return c;
}

void write_open_edges(std::ostream& os, const Config& config) {
  for (EdgeId e = 0; e < config.open.size(); ++e)
    if (config.open[e]) os << e << '\n';
}

void UnionFind::reset(std::size_t n) {
  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), 0u);
  size_.assign(n, 1);
  histogram_.assign(n + 1, 0);
  if (n > 0) histogram_[1] = static_cast<std::uint32_t>(n);
  components_ = n;
  k1_ = n > 0 ? 1 : 0;
  k2_ = n > 1 ? 1 : 0;
}

bool UnionFind::unite(std::uint32_t a, std::uint32_t b) {
  auto ra = find(a);
  auto rb = find(b);
  if (ra == rb) return false;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  const std::size_t sa = size_[ra];
  const std::size_t sb = size_[rb];
  const std::size_t merged = sa + sb;
  parent_[rb] = ra;
  size_[ra] = static_cast<std::uint32_t>(merged);
  --histogram_[sa];
  --histogram_[sb];
  ++histogram_[merged];
  --components_;

  // Every component other than one copy of K_1 is bounded by `start`, so the
  // downward scan for K_2 begins there.
  const std::size_t old_k1 = k1_;
  std::size_t start;
  if (merged > old_k1) {
    k1_ = merged;
    start = histogram_[old_k1] > 0 ? old_k1 : k2_;
  } else {
    start = std::max(k2_, merged);
  }
  start = std::min(start, k1_);
  k2_ = 0;
  for (std::size_t s = start; s >= 1; --s) {
    const std::size_t avail = histogram_[s] - (s == k1_ ? 1 : 0);
    if (avail > 0) {
      k2_ = s;
      break;
    }
  }
  return true;
}

std::vector<std::size_t> ClusterReport::sorted_sizes() const {
  auto out = sizes;
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

ClusterReport clusters(const FiniteGraph& g, const Config& config) {
  if (config.open.size() != g.edge_count()) throw std::invalid_argument("config does not match graph");
  const auto n = g.vertex_count();
  UnionFind uf(n);
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e)
    if (config.open[e]) uf.unite(edges[e].u, edges[e].v);

  ClusterReport r;
  r.vertex_count = n;
  r.label.assign(n, 0);
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label_of_root(n, kNone);
  for (VertexId v = 0; v < n; ++v) {
    const auto root = uf.find(v);
    if (label_of_root[root] == kNone) {
      label_of_root[root] = static_cast<std::uint32_t>(r.sizes.size());
      r.sizes.push_back(0);
    }
    r.label[v] = label_of_root[root];
    ++r.sizes[r.label[v]];
  }
  r.k1 = uf.largest();
  r.k2 = uf.second_largest();
  return r;
}

bool connected(const FiniteGraph& g, const Config& config, VertexId u, VertexId v) {
  if (u >= g.vertex_count() || v >= g.vertex_count()) throw std::out_of_range("vertex out of range");
  if (u == v) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{u};
  seen[u] = 1;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    auto nb = g.neighbors(x);
    auto ids = g.incident_edges(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (!config.open[ids[i]] || seen[nb[i]]) continue;
      if (nb[i] == v) return true;
      seen[nb[i]] = 1;
      stack.push_back(nb[i]);
    }
  }
  return false;
}

std::size_t EvolutionCurve::step_at(double p) const {
  if (!(p > 0.0)) return 0;
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints.begin(), breakpoints.end(), p) - breakpoints.begin());
}

std::optional<std::size_t> EvolutionCurve::first_step_reaching(std::size_t min_k1) const {
  auto it = std::lower_bound(k1_at_step.begin(), k1_at_step.end(), min_k1);
  if (it == k1_at_step.end()) return std::nullopt;
  return static_cast<std::size_t>(it - k1_at_step.begin());
}

double EvolutionCurve::critical_p(std::size_t min_k1) const {
  auto step = first_step_reaching(min_k1);
  if (!step) return std::numeric_limits<double>::infinity();
  return *step == 0 ? 0.0 : breakpoints[*step - 1];
}

namespace {
std::vector<EdgeId> sorted_order(const PercolationSample& sample) {
  std::vector<EdgeId> order(sample.weights.size());
  std::iota(order.begin(), order.end(), 0u);
  const auto& w = sample.weights;
  std::sort(order.begin(), order.end(),
            [&](EdgeId a, EdgeId b) { return w[a] != w[b] ? w[a] < w[b] : a < b; });
  return order;
}
}  // namespace

EvolutionCurve evolution_curve(const FiniteGraph& g, const PercolationSample& sample) {
  EvolutionCurve c;
  c.vertex_count = g.vertex_count();
  c.order = sorted_order(sample);
  const auto m = c.order.size();
  c.breakpoints.resize(m);
  c.k1_at_step.resize(m + 1);
  c.k2_at_step.resize(m + 1);
  UnionFind uf(g.vertex_count());
  c.k1_at_step[0] = static_cast<std::uint32_t>(uf.largest());
  c.k2_at_step[0] = static_cast<std::uint32_t>(uf.second_largest());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = c.order[i];
    c.breakpoints[i] = sample.weights[e];
    uf.unite(edges[e].u, edges[e].v);
    c.k1_at_step[i + 1] = static_cast<std::uint32_t>(uf.largest());
    c.k2_at_step[i + 1] = static_cast<std::uint32_t>(uf.second_largest());
  }
  return c;
}

double critical_p(const FiniteGraph& g, const PercolationSample& sample, std::size_t min_k1) {
  if (min_k1 <= 1) return 0.0;
  if (min_k1 > g.vertex_count()) return std::numeric_limits<double>::infinity();
  const auto order = sorted_order(sample);
  UnionFind uf(g.vertex_count());
  const auto edges = g.edges();
  for (auto e : order) {
    uf.unite(edges[e].u, edges[e].v);
    if (uf.largest() >= min_k1) return sample.weights[e];
  }
  return std::numeric_limits<double>::infinity();
}

std::size_t GhostField::count() const {
  return static_cast<std::size_t>(std::count(ghost.begin(), ghost.end(), std::uint8_t{1}));
}

GhostField sample_ghost(const FiniteGraph& g, double q, std::uint64_t seed, std::uint64_t trial) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("ghost intensity must lie in [0, 1]");
  GhostField f;
  f.q = q;
  std::vector<double> u(g.vertex_count());
  kernels::fill_uniform(StreamKey{seed, trial, Stream::kGhosts}, 0, u);
  f.ghost.resize(u.size());
  kernels::threshold_lt(u, q, f.ghost);
  return f;
}

bool ghost_connected(const FiniteGraph& g, const Config& config, const GhostField& ghost, VertexId v) {
  if (ghost.ghost[v]) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{v};
  seen[v] = 1;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    auto nb = g.neighbors(x);
    auto ids = g.incident_edges(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (!config.open[ids[i]] || seen[nb[i]]) continue;
      if (ghost.ghost[nb[i]]) return true;
      seen[nb[i]] = 1;
      stack.push_back(nb[i]);
    }
  }
  return false;
}

bool two_arm_event(const FiniteGraph& g, const ClusterReport& report, EdgeId e, std::size_t n) {
  const auto& edge = g.edge(e);
  const auto a = report.label[edge.u];
  const auto b = report.label[edge.v];
  return a != b && report.sizes[a] >= n && report.sizes[b] >= n;
}

bool two_arm_event(const FiniteGraph& g, const Config& config, EdgeId e, std::size_t n) {
  if (e >= g.edge_count()) throw std::out_of_range("edge id out of range");
  if (n < 1) throw std::invalid_argument("two-arm size threshold must be >= 1");
  return two_arm_event(g, clusters(g, config), e, n);
}

bool piv_event(const FiniteGraph& g, const Config& config, VertexId root, double m, double n) {
  auto dist = bfs_distances(g, root);
  return piv_event(g, config, dist, m, n);
}

bool piv_event(const FiniteGraph& g, const Config& config, std::span<const int> dist, double m,
               double n) {
  const int inner = floor_radius(m);
  const int outer = floor_radius(n);
  if (inner < 1 || inner >= outer) throw std::invalid_argument("Piv[m, n] needs 1 <= m < n");
  const auto nv = g.vertex_count();
  bool sphere_nonempty = false;
  for (auto d : dist) sphere_nonempty |= d == outer;
  if (!sphere_nonempty) throw InfeasibleError("scale exceeds diameter");

  UnionFind uf(nv);
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (config.open[e] && dist[edges[e].u] <= outer && dist[edges[e].v] <= outer) {
      uf.unite(edges[e].u, edges[e].v);
    }
  }
  // A crossing cluster contains a vertex of B_m and a vertex of S_n.
  std::vector<std::uint8_t> touches(nv, 0);  // bit 0: meets B_m, bit 1: meets S_n
  for (VertexId v = 0; v < nv; ++v) {
    if (dist[v] <= inner) touches[uf.find(v)] |= 1;
    if (dist[v] == outer) touches[uf.find(v)] |= 2;
  }
  int crossing = 0;
  for (VertexId v = 0; v < nv; ++v) {
    if (touches[v] == 3 && ++crossing >= 2) return true;
  }
  return false;
}

void check_walk(const FiniteGraph& g, std::span<const VertexId> path) {
  if (path.empty()) throw std::invalid_argument("path must contain at least one vertex");
  for (auto v : path)
    if (v >= g.vertex_count()) throw std::out_of_range("path vertex out of range");
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!g.edge_id(path[i - 1], path[i])) throw std::invalid_argument("path is not a walk in the graph");
  }
}

std::vector<char> tube_mask(const FiniteGraph& g, std::span<const VertexId> path, double n) {
  check_walk(g, path);
  const auto dist = bfs_distances(g, path, floor_radius(n));
  std::vector<char> mask(g.vertex_count(), 0);
  for (VertexId v = 0; v < mask.size(); ++v) mask[v] = dist[v] != kUnreached;
  return mask;
}

bool tube_connected(const FiniteGraph& g, const Config& config, std::span<const char> tube,
                    VertexId start, VertexId end) {
  if (start == end) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    auto nb = g.neighbors(x);
    auto ids = g.incident_edges(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const auto w = nb[i];
      if (!config.open[ids[i]] || !tube[w] || seen[w]) continue;
      if (w == end) return true;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

bool tube_connected(const FiniteGraph& g, const Config& config, std::span<const VertexId> path,
                    double n) {
  if (n < 0) throw std::invalid_argument("tube radius must be >= 0");
  const auto tube = tube_mask(g, path, n);
  return tube_connected(g, config, tube, path.front(), path.back());
}

}  // namespace perclab
