#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "perclab/graph.hpp"
#include "perclab/rng.hpp"

namespace perclab {

/// Per-edge uniform weights: one realisation of the standard monotone
/// coupling. The configuration at parameter p opens exactly the edges whose
/// weight is <= p.
struct PercolationSample {
  const FiniteGraph* graph = nullptr;
  std::vector<double> weights;
  StreamKey key;
};

/// Weights are uniform_at({seed, trial, kEdgeWeights}, e): a pure function of
/// (seed, trial, edge id), independent of thread count and SIMD level.
PercolationSample sample_weights(const FiniteGraph& g, std::uint64_t seed, std::uint64_t trial = 0);

/// Refills `sample.weights` in place for another trial (avoids reallocating).
void resample(PercolationSample& sample, std::uint64_t seed, std::uint64_t trial);

struct Config {
  std::vector<std::uint8_t> open;
  /// Threshold used when derived from a sample; nullopt for explicit configs.
  std::optional<double> p;

  std::size_t open_count() const;

  static Config all(const FiniteGraph& g, bool open);
  static Config from_edge_ids(const FiniteGraph& g, std::span<const EdgeId> open_ids);
  /// Throws std::invalid_argument if some pair is not an edge of g.
  static Config from_pairs(const FiniteGraph& g, std::span<const Edge> open_pairs);
};

/// p is clamped to [0, 1]; p <= 0 closes every edge (so P_0 is exact even for
/// a zero weight), otherwise open(e) <=> weight(e) <= p.
Config config_at(const PercolationSample& sample, double p);
void config_at(const PercolationSample& sample, double p, Config& out);

/// One id per line, ascending.
void write_open_edges(std::ostream& os, const Config& config);

/// Union-find with union by size and path halving. Tracks the two largest
/// component sizes incrementally (K_1, K_2) through a size histogram.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);

  std::uint32_t find(std::uint32_t v) noexcept {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  /// Returns true when a merge happened.
  bool unite(std::uint32_t a, std::uint32_t b);

  std::size_t size_of(std::uint32_t v) noexcept { return size_[find(v)]; }
  std::size_t largest() const noexcept { return k1_; }
  /// Size of the second largest component; 0 when only one component is left.
  std::size_t second_largest() const noexcept { return k2_; }
  std::size_t components() const noexcept { return components_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> histogram_;  // histogram_[s] = #components of size s
  std::size_t k1_ = 0;
  std::size_t k2_ = 0;
  std::size_t components_ = 0;
};

struct ClusterReport {
  /// Cluster ids are dense, numbered by smallest member vertex.
  std::vector<std::uint32_t> label;
  std::vector<std::size_t> sizes;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t vertex_count = 0;

  std::size_t size_of_vertex(VertexId v) const { return sizes[label[v]]; }
  /// The density |A| / |V|.
  double density(std::size_t cardinality) const {
    return static_cast<double>(cardinality) / static_cast<double>(vertex_count);
  }
  /// Cluster sizes in decreasing order.
  std::vector<std::size_t> sorted_sizes() const;
};

ClusterReport clusters(const FiniteGraph& g, const Config& config);

bool connected(const FiniteGraph& g, const Config& config, VertexId u, VertexId v);

/// Largest-cluster sizes after each insertion of edges in increasing weight
/// order (ties broken by edge id).
struct EvolutionCurve {
  std::vector<double> breakpoints;  // sorted weights
  std::vector<EdgeId> order;        // edge ids in insertion order
  std::vector<std::uint32_t> k1_at_step;  // size |E|+1
  std::vector<std::uint32_t> k2_at_step;  // size |E|+1
  std::size_t vertex_count = 0;

  /// Number of open edges of config_at(sample, p).
  std::size_t step_at(double p) const;
  std::size_t k1_at(double p) const { return k1_at_step[step_at(p)]; }
  std::size_t k2_at(double p) const { return k2_at_step[step_at(p)]; }
  double alpha(double p) const {
    return static_cast<double>(k1_at(p)) / static_cast<double>(vertex_count);
  }
  /// First step with k1 >= min_k1 (nullopt if never reached).
  std::optional<std::size_t> first_step_reaching(std::size_t min_k1) const;
  /// Smallest p at which k1 >= min_k1 for this sample: the weight of the edge
  /// whose insertion reaches the level, 0 if already reached with no edges,
  /// +infinity if never reached.
  double critical_p(std::size_t min_k1) const;
};

EvolutionCurve evolution_curve(const FiniteGraph& g, const PercolationSample& sample);

/// Just the per-sample critical parameter for {K_1 >= min_k1}, stopping the
/// insertion early.
double critical_p(const FiniteGraph& g, const PercolationSample& sample, std::size_t min_k1);

struct GhostField {
  std::vector<std::uint8_t> ghost;
  double q = 0.0;
  std::size_t count() const;
};

/// Vertex v is a ghost iff uniform_at({seed, trial, kGhosts}, v) < q.
GhostField sample_ghost(const FiniteGraph& g, double q, std::uint64_t seed, std::uint64_t trial = 0);

/// The open cluster of v meets the ghost set (v itself counts).
bool ghost_connected(const FiniteGraph& g, const Config& config, const GhostField& ghost, VertexId v);

/// Endpoints of e lie in distinct open clusters, each with at least n
/// vertices. e's own state is read from the configuration as given.
bool two_arm_event(const FiniteGraph& g, const Config& config, EdgeId e, std::size_t n);
bool two_arm_event(const FiniteGraph& g, const ClusterReport& report, EdgeId e, std::size_t n);

/// Piv[m, n] around `root`: in the configuration restricted to edges with both
/// endpoints in B_n(root), at least two distinct clusters each meet B_m and
/// S_n. Requires 1 <= m < n; throws InfeasibleError if S_n is empty.
bool piv_event(const FiniteGraph& g, const Config& config, VertexId root, double m, double n);
/// Same with precomputed distances from the root.
bool piv_event(const FiniteGraph& g, const Config& config, std::span<const int> dist_from_root,
               double m, double n);

/// Validates that `path` is a walk in g (consecutive vertices adjacent).
void check_walk(const FiniteGraph& g, std::span<const VertexId> path);

/// Vertex mask of the tube B_n(path) = union of B_n(path_i).
std::vector<char> tube_mask(const FiniteGraph& g, std::span<const VertexId> path, double n);

/// start(path) and end(path) are joined by open edges with both endpoints in
/// B_n(path).
bool tube_connected(const FiniteGraph& g, const Config& config, std::span<const VertexId> path,
                    double n);
bool tube_connected(const FiniteGraph& g, const Config& config, std::span<const char> tube,
                    VertexId start, VertexId end);

}  // namespace perclab
