#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perclab/graph.hpp"

namespace perclab {

// ---------------------------------------------------------------- spheres

struct ExposedSphere {
  VertexId root = 0;
  int n = 0;
  /// u in S_n joined to S_{2n+1} by a path whose interior avoids B_n.
  std::vector<VertexId> members;
  bool sphere_out_of_range = false;  // S_{2n+1} is empty
};

ExposedSphere exposed_sphere(const FiniteGraph& g, VertexId root, int n);

// ---------------------------------------------------------------- sets

struct RConnectedness {
  bool connected = true;
  /// When not r-connected: a split of the set into two nonempty sides at
  /// distance > r (side_a is the part containing the smallest member).
  std::vector<VertexId> side_a;
  std::vector<VertexId> side_b;
};

RConnectedness is_r_connected(const FiniteGraph& g, std::span<const VertexId> set, int r);

struct RemovalComponents {
  /// Components of G - removed, restricted to the probe set, ordered by
  /// smallest member; members sorted.
  std::vector<std::vector<VertexId>> parts;
  bool probe_overlap_dropped = false;
  bool disconnects() const { return parts.size() >= 2; }
};

RemovalComponents removal_components(const FiniteGraph& g, std::span<const VertexId> removed,
                                     std::span<const VertexId> probe);

struct CutsetReport {
  std::vector<VertexId> cutset;
  std::vector<VertexId> source;
  std::vector<VertexId> target;
  bool is_cutset = false;
  bool is_minimal = false;
  /// Non-cutset: a path from source to target avoiding the cutset.
  std::vector<VertexId> violating_path;
  /// Cutset but not minimal: a member whose removal keeps it a cutset.
  std::optional<VertexId> removable;
};

/// Requires cutset, source and target pairwise disjoint (std::invalid_argument).
CutsetReport cutset_audit(const FiniteGraph& g, std::span<const VertexId> cutset, std::span<const VertexId> source,
                          std::span<const VertexId> target);

/// A randomly placed minimal (A, B)-cutset: A = B_{k-1}(a), B = B_j(b), and
/// the cutset is the part of S_k(a) that reaches B outside B_k(a).
struct CutsetInstance {
  std::vector<VertexId> source;
  std::vector<VertexId> target;
  std::vector<VertexId> cutset;
};

std::optional<CutsetInstance> random_minimal_cutset(const FiniteGraph& g, std::uint64_t seed);

// ---------------------------------------------------------------- cycle space

struct DeltaBudget {
  std::size_t max_vertices = 4096;
  std::size_t max_edges = 8192;
  /// Cap on (candidate cycles) x (cycle-space rank) x (words per vector).
  double max_work = 4e9;
};

struct CycleSpaceBracket {
  bool determined = false;
  bool trivial = false;  // empty cycle space, delta = 0 by convention
  int delta_lower = 0;
  int delta_upper = 0;
  std::size_t rank_full = 0;  // |E| - |V| + components
  /// Smallest m such that the cycle spaces of all ball subgraphs B_m(v)
  /// generate the whole cycle space.
  int generating_radius = 0;
  std::string note;
};

CycleSpaceBracket delta_bracket(const FiniteGraph& g, const DeltaBudget& budget = {});

/// Rank over GF(2) of a family of edge-indicator vectors.
std::size_t gf2_rank(std::size_t edge_count, const std::vector<std::vector<EdgeId>>& cycles);

// ---------------------------------------------------------------- tubes

struct TubeFamily {
  int n = 0;
  int k = 0;
  int r = 0;
  int l = 0;
  std::string endpoints;  // "spheres" or "sets"
  std::vector<std::vector<VertexId>> tubes;
  bool success = false;  // tubes.size() >= k (every tube has length <= l)
};

/// Greedy packing between S_n and S_{4n} around root (4n <= diameter).
TubeFamily plentiful_tubes(const FiniteGraph& g, VertexId root, int n, int k, int r, int l);
/// Same between explicit endpoint sets.
TubeFamily plentiful_tubes(const FiniteGraph& g, std::span<const VertexId> from, std::span<const VertexId> to, int k,
                           int r, int l);

/// Re-checks lengths, endpoint membership and pairwise distance > 2r.
bool verify_tubes(const FiniteGraph& g, const TubeFamily& family, std::span<const VertexId> from,
                  std::span<const VertexId> to);

// ---------------------------------------------------------------- GH to S^1

struct CycleWitness {
  std::vector<VertexId> cycle;  // closed walk without repeating the start
  int density = 0;              // max_v dist(v, cycle)
  int defect = 0;               // max_{s,t} (|s-t|_l - dist(cycle_s, cycle_t))_+
};

/// Searches fundamental cycles of BFS trees from `budget_roots` roots for a
/// cycle with density <= diameter / 8.
std::optional<CycleWitness> dense_cycle_certificate(const FiniteGraph& g, std::size_t budget_roots = 4);

struct GHCertificate {
  enum class Kind { kUpper, kLower };
  Kind kind = Kind::kUpper;
  double value = 0.0;
  int diameter = 0;
  bool trivial = false;
  // upper
  std::optional<CycleWitness> cycle;
  double term_scale = 0.0;   // (2 pi / l)(a + b + 1)
  double term_length = 0.0;  // pi D |1/D - 2/l|
  // lower
  std::vector<VertexId> packing;
  int separation = 0;  // graph distance between packed points
  double epsilon = 0.0;  // (pi / D) * separation
};

/// Trivial GH bound: half the larger diameter after rescaling.
inline constexpr double kTrivialGH = 1.5707963267948966;

GHCertificate gh_circle_upper(const FiniteGraph& g, std::size_t budget_roots = 4);
GHCertificate gh_circle_lower(const FiniteGraph& g);

/// Independent re-checks of a certificate against the graph.
bool verify_upper(const FiniteGraph& g, const GHCertificate& c);
bool verify_lower(const FiniteGraph& g, const GHCertificate& c);

struct GammaQuantities {
  double gamma_low = 0.0;
  double gamma_high = 0.0;
  /// log of gamma+ = (log gamma)^9, kept in log space.
  double log_gamma_plus_low = 0.0;
  double log_gamma_plus_high = 0.0;
  bool exceeds_graph = false;  // gamma+ lower end > |V|
  bool circle_like_fast = false;  // gamma+ upper end <= diameter
  int diameter = 0;
};

GammaQuantities gamma_quantities(const FiniteGraph& g, const GHCertificate& upper, const GHCertificate& lower);
GammaQuantities gamma_quantities(const FiniteGraph& g);

}  // namespace perclab
