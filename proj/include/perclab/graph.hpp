#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace perclab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Malformed graph-spec string. `position` is the 0-based column where parsing
/// stopped (std::string::npos when the problem is not tied to a column).
class SpecError : public std::invalid_argument {
 public:
  SpecError(const std::string& what, std::size_t position = std::string::npos)
      : std::invalid_argument(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A structurally valid request that cannot be served at the given scale
/// (sphere beyond the diameter, ball too large for an exhaustive search, ...).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId u;
  VertexId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph in CSR form.
///
/// Edges are stored once with u < v, sorted lexicographically; an EdgeId is the
/// position in that list. Every adjacency slot also records the id of the edge
/// it came from so that percolation configurations (indexed by EdgeId) can be
/// read while walking neighbourhoods.
class FiniteGraph {
 public:
  FiniteGraph() = default;

  /// Builds a graph from an unordered edge list. Rejects loops, duplicate
  /// pairs and out-of-range endpoints. Connectivity and regularity are NOT
  /// required here (test fixtures such as paths and trees use this); the
  /// generators check both.
  static FiniteGraph from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                std::string spec_string);

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::string& spec_string() const noexcept { return spec_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const VertexId> neighbors(VertexId v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  /// Edge ids aligned with neighbors(v).
  std::span<const EdgeId> incident_edges(VertexId v) const noexcept {
    return {incident_.data() + offsets_[v], incident_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  /// Common degree when regular, std::nullopt otherwise.
  std::optional<std::size_t> regular_degree() const noexcept;
  bool is_connected() const;

  std::optional<EdgeId> edge_id(VertexId a, VertexId b) const noexcept;

  /// `u v` per line, 0-based, in EdgeId order.
  void write_edge_list(std::ostream& os) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<EdgeId> incident_;
  std::vector<Edge> edges_;
  std::string spec_;
};

/// Parses a graph spec and builds the graph:
///   cycle:<n>                  n >= 3
///   torus:<n1>x<n2>[x...]      each n_i >= 3, row-major numbering
///   circulant:<n>:<s1,s2,...>  Z_n with steps +-s_i
///   cayley:<path>              multiplication-table file, see load_cayley
/// The result is connected, simple and regular; vertex 0 is the root.
FiniteGraph generate(std::string_view spec);

/// Cayley graph from a group table file: first line `n k`, then n rows of n
/// element indices (row a, column b holds a*b), then k generator indices.
/// Group axioms and closure of the generating set under inverses are checked.
FiniteGraph load_cayley(const std::string& path);

/// Same as load_cayley but from in-memory text (used by tests).
FiniteGraph cayley_from_text(std::string_view text, std::string spec_string);

}  // namespace perclab
