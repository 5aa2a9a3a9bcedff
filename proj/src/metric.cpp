#include "perclab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "perclab/rng.hpp"

namespace perclab {

std::vector<int> bfs_distances(const FiniteGraph& g, VertexId root) {
  if (root >= g.vertex_count()) throw std::out_of_range("root out of range");
  const VertexId src[] = {root};
  return bfs_distances(g, src);
}

std::vector<int> bfs_distances(const FiniteGraph& g, std::span<const VertexId> sources,
                               int max_depth, std::span<const char> allowed) {
  const auto n = g.vertex_count();
  std::vector<int> dist(n, kUnreached);
  std::vector<VertexId> queue;
  queue.reserve(n);
  const bool masked = !allowed.empty();
  for (auto s : sources) {
    if (s >= n) throw std::out_of_range("BFS source out of range");
    if (masked && !allowed[s]) continue;
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  if (max_depth < 0) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    return dist;
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto v = queue[head];
    const int dv = dist[v];
    if (dv >= max_depth) continue;
    for (auto w : g.neighbors(v)) {
      if (dist[w] != kUnreached) continue;
      if (masked && !allowed[w]) continue;
      dist[w] = dv + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

std::size_t MetricProfile::ball_size(double r) const {
  const int k = floor_radius(r);
  if (k < 0) return 0;
  if (k >= diameter) return growth.back();
  return growth[static_cast<std::size_t>(k)];
}

std::size_t MetricProfile::sphere_size(double r) const {
  const int k = floor_radius(r);
  if (k < 0 || k > diameter) return 0;
  return k == 0 ? 1 : growth[static_cast<std::size_t>(k)] - growth[static_cast<std::size_t>(k - 1)];
}

MetricProfile metric_profile(const FiniteGraph& g, VertexId root, MetricOptions opts) {
  MetricProfile m;
  m.root = root;
  m.distances = bfs_distances(g, root);
  for (auto d : m.distances) {
    if (d == kUnreached) throw std::invalid_argument("graph is disconnected");
    m.diameter = std::max(m.diameter, d);
  }
  std::vector<std::size_t> per_sphere(static_cast<std::size_t>(m.diameter) + 1, 0);
  for (auto d : m.distances) ++per_sphere[static_cast<std::size_t>(d)];
  m.growth.resize(per_sphere.size());
  std::size_t acc = 0;
  for (std::size_t i = 0; i < per_sphere.size(); ++i) m.growth[i] = acc += per_sphere[i];

  if (opts.verify_diameter && g.vertex_count() <= 2000) {
    const int full = all_pairs_diameter(g);
    if (full != m.diameter) {
      throw std::logic_error("root eccentricity " + std::to_string(m.diameter) +
                             " differs from graph diameter " + std::to_string(full) +
                             " (graph is not vertex-transitive)");
    }
  }
  return m;
}

int all_pairs_diameter(const FiniteGraph& g) {
  int best = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (auto d : bfs_distances(g, v)) {
      if (d == kUnreached) throw std::invalid_argument("graph is disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

namespace {
std::vector<VertexId> select(const std::vector<int>& dist, auto pred) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < dist.size(); ++v)
    if (pred(dist[v])) out.push_back(v);
  return out;
}
}  // namespace

std::vector<VertexId> ball(const MetricProfile& m, double r) {
  const int k = floor_radius(r);
  return select(m.distances, [k](int d) { return d <= k; });
}

std::vector<VertexId> sphere(const MetricProfile& m, double r) {
  const int k = floor_radius(r);
  return select(m.distances, [k](int d) { return d == k; });
}

std::vector<VertexId> ball(const FiniteGraph& g, VertexId root, double r) {
  return select(bfs_distances(g, root), [k = floor_radius(r)](int d) { return d <= k; });
}

std::vector<VertexId> sphere(const FiniteGraph& g, VertexId root, double r) {
  return select(bfs_distances(g, root), [k = floor_radius(r)](int d) { return d == k; });
}

Net build_net(const FiniteGraph& g, double r) {
  const int radius = floor_radius(r);
  if (radius < 1) throw std::invalid_argument("net radius must be >= 1");
  const auto n = g.vertex_count();
  Net net;
  net.radius = radius;

  // dist_to_centers[v] < 2r means v is too close to an existing centre.
  std::vector<int> dist_to_centers(n, kUnreached);
  std::vector<VertexId> queue;
  auto add_center = [&](VertexId c) {
    net.centers.push_back(c);
    queue.assign(1, c);
    dist_to_centers[c] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      auto v = queue[head];
      if (dist_to_centers[v] + 1 >= 2 * radius) continue;
      for (auto w : g.neighbors(v)) {
        if (dist_to_centers[w] > dist_to_centers[v] + 1) {
          dist_to_centers[w] = dist_to_centers[v] + 1;
          queue.push_back(w);
        }
      }
    }
  };
  add_center(0);
  for (VertexId v = 1; v < n; ++v) {
    if (dist_to_centers[v] >= 2 * radius) add_center(v);
  }

  // Proximity graph on centres (distance <= 5r), spanning tree by BFS.
  const auto k = net.centers.size();
  std::vector<std::size_t> index_of(n, k);
  for (std::size_t i = 0; i < k; ++i) index_of[net.centers[i]] = i;
  std::vector<std::vector<std::size_t>> prox(k);
  for (std::size_t i = 0; i < k; ++i) {
    const VertexId src[] = {net.centers[i]};
    auto d = bfs_distances(g, src, 5 * radius);
    for (VertexId v = 0; v < n; ++v) {
      if (d[v] != kUnreached && index_of[v] != k && index_of[v] != i) prox[i].push_back(index_of[v]);
    }
  }
  net.parent.assign(k, k);
  net.parent[0] = 0;
  std::vector<std::size_t> bq{0};
  for (std::size_t head = 0; head < bq.size(); ++head) {
    auto i = bq[head];
    for (auto j : prox[i]) {
      if (net.parent[j] == k) {
        net.parent[j] = i;
        bq.push_back(j);
      }
    }
  }
  if (bq.size() != k) throw std::logic_error("net proximity graph is disconnected");
  return net;
}

std::optional<bool> rooted_balls_isomorphic(const FiniteGraph& g, VertexId u, VertexId v, int r,
                                            std::size_t max_ball_size) {
  struct LocalBall {
    std::vector<VertexId> verts;      // BFS order, verts[0] is the root
    std::vector<int> depth;
    std::vector<std::vector<char>> adj;
    std::vector<int> local_degree;
  };
  auto make = [&](VertexId root) -> std::optional<LocalBall> {
    const VertexId src[] = {root};
    auto d = bfs_distances(g, src, r);
    LocalBall b;
    for (VertexId w = 0; w < g.vertex_count(); ++w)
      if (d[w] != kUnreached) b.verts.push_back(w);
    if (b.verts.size() > max_ball_size) return std::nullopt;
    std::stable_sort(b.verts.begin(), b.verts.end(), [&](auto a, auto c) { return d[a] < d[c]; });
    const auto m = b.verts.size();
    b.depth.resize(m);
    b.adj.assign(m, std::vector<char>(m, 0));
    b.local_degree.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      b.depth[i] = d[b.verts[i]];
      for (std::size_t j = 0; j < m; ++j) {
        if (g.edge_id(b.verts[i], b.verts[j])) {
          b.adj[i][j] = 1;
          ++b.local_degree[i];
        }
      }
    }
    return b;
  };
  auto a = make(u);
  auto b = make(v);
  if (!a || !b) return std::nullopt;
  const auto m = a->verts.size();
  if (m != b->verts.size()) return false;

  std::vector<std::size_t> map(m, m);
  std::vector<char> used(m, 0);
  std::function<bool(std::size_t)> extend = [&](std::size_t i) -> bool {
    if (i == m) return true;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || a->depth[i] != b->depth[j] || a->local_degree[i] != b->local_degree[j]) continue;
      if (i == 0 && j != 0) continue;  // roots map to roots
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k) ok = a->adj[i][k] == b->adj[j][map[k]];
      if (!ok) continue;
      map[i] = j;
      used[j] = 1;
      if (extend(i + 1)) return true;
      used[j] = 0;
    }
    return false;
  };
  return extend(0);
}

HomogeneityReport check_local_homogeneity(const FiniteGraph& g, double r, std::size_t sample_pairs,
                                          std::uint64_t seed, std::size_t max_ball_size) {
  HomogeneityReport report;
  const int radius = floor_radius(r);
  SplitMix64 rng(seed);
  const auto n = g.vertex_count();
  for (std::size_t i = 0; i < sample_pairs; ++i) {
    const auto v = static_cast<VertexId>(n <= 1 ? 0 : 1 + rng.below(n - 1));
    auto iso = rooted_balls_isomorphic(g, 0, v, radius, max_ball_size);
    ++report.pairs_checked;
    if (!iso) {
      report.inconclusive = true;
      continue;
    }
    if (!*iso) {
      report.homogeneous = false;
      report.failing_pair = std::make_pair(VertexId{0}, v);
      return report;
    }
  }
  return report;
}

bool is_low_growth(const MetricProfile& m, double n, double exponent) {
  if (!(n >= 3.0)) throw std::invalid_argument("low-growth scales start at n = 3");
  if (!(exponent > 1.0)) throw std::invalid_argument("low-growth exponent must exceed 1");
  const double log_gr = std::log(static_cast<double>(m.ball_size(n)));
  return log_gr <= std::pow(std::log(n), exponent);
}

bool is_low_growth(const FiniteGraph& g, double n, double exponent) {
  return is_low_growth(metric_profile(g, 0), n, exponent);
}

}  // namespace perclab
