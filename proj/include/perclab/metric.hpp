#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "perclab/graph.hpp"

namespace perclab {

inline constexpr int kUnreached = std::numeric_limits<int>::max();

/// Radii are real-valued and floored; negative radii behave like an empty
/// neighbourhood (radius -1).
inline int floor_radius(double r) {
  if (!(r >= 0.0)) return -1;
  if (r >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return static_cast<int>(r);
}

/// Exact BFS distances from one root. Unreached vertices get kUnreached.
std::vector<int> bfs_distances(const FiniteGraph& g, VertexId root);

/// Multi-source BFS restricted to `max_depth` (vertices farther away stay
/// kUnreached). An empty `allowed` mask means every vertex may be traversed;
/// otherwise sources and traversed vertices must have allowed[v] != 0.
std::vector<int> bfs_distances(const FiniteGraph& g, std::span<const VertexId> sources,
                               int max_depth = kUnreached,
                               std::span<const char> allowed = {});

struct MetricProfile {
  VertexId root = 0;
  std::vector<int> distances;
  /// growth[n] = |B_n(root)| for n = 0..diameter.
  std::vector<std::size_t> growth;
  int diameter = 0;

  /// Gr(floor(r)), saturating at |V| beyond the diameter.
  std::size_t ball_size(double r) const;
  std::size_t sphere_size(double r) const;
};

struct MetricOptions {
  /// Recompute the diameter as max eccentricity over all vertices and
  /// throw std::logic_error if it disagrees with the root eccentricity.
  /// Only honoured when |V| <= 2000.
  bool verify_diameter = false;
};

MetricProfile metric_profile(const FiniteGraph& g, VertexId root, MetricOptions opts = {});

/// Max eccentricity over all vertices (O(|V| |E|)).
int all_pairs_diameter(const FiniteGraph& g);

std::vector<VertexId> ball(const FiniteGraph& g, VertexId root, double r);
std::vector<VertexId> sphere(const FiniteGraph& g, VertexId root, double r);
std::vector<VertexId> ball(const MetricProfile& m, double r);
std::vector<VertexId> sphere(const MetricProfile& m, double r);

/// Maximal 2r-separated set of centres seeded at vertex 0 (scanning vertices
/// in canonical order), with a BFS spanning tree of the graph on centres
/// joined when their distance is at most 5r.
struct Net {
  int radius = 0;
  std::vector<VertexId> centers;  // centers[0] is the root
  /// parent[i] is the index into `centers` of centre i's tree parent;
  /// parent[0] == 0.
  std::vector<std::size_t> parent;
};

Net build_net(const FiniteGraph& g, double r);

struct HomogeneityReport {
  bool homogeneous = true;
  bool inconclusive = false;  // some ball exceeded the exhaustive-search limit
  std::optional<std::pair<VertexId, VertexId>> failing_pair;
  std::size_t pairs_checked = 0;
};

/// Tests rooted isomorphism B_r(u) ~ B_r(v) for `sample_pairs` pairs (0, v)
/// with v drawn deterministically from `seed`. Balls larger than
/// `max_ball_size` are skipped and mark the report inconclusive.
HomogeneityReport check_local_homogeneity(const FiniteGraph& g, double r, std::size_t sample_pairs,
                                          std::uint64_t seed = 0, std::size_t max_ball_size = 40);

/// Rooted-graph isomorphism between the induced balls B_r(u) and B_r(v).
/// Returns std::nullopt if a ball has more than `max_ball_size` vertices.
std::optional<bool> rooted_balls_isomorphic(const FiniteGraph& g, VertexId u, VertexId v, int r,
                                            std::size_t max_ball_size = 40);

/// n is a low-growth scale: Gr(n) <= exp((log n)^exponent). Evaluated in log
/// space so large exponents do not overflow.
bool is_low_growth(const FiniteGraph& g, double n, double exponent = 100.0);
bool is_low_growth(const MetricProfile& m, double n, double exponent = 100.0);

}  // namespace perclab
