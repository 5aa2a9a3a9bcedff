#include "perclab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace perclab {

FiniteGraph FiniteGraph::from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                    std::string spec_string) {
  if (vertex_count == 0) throw std::invalid_argument("graph must have at least one vertex");
  if (vertex_count > std::numeric_limits<VertexId>::max()) {
    throw std::invalid_argument("too many vertices");
  }
  for (auto& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge");
  }

  FiniteGraph g;
  g.spec_ = std::move(spec_string);
  g.offsets_.assign(vertex_count + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(2 * edges.size());
  g.incident_.resize(2 * edges.size());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const auto& e = edges[id];
    g.neighbors_[fill[e.u]] = e.v;
    g.incident_[fill[e.u]++] = id;
    g.neighbors_[fill[e.v]] = e.u;
    g.incident_[fill[e.v]++] = id;
  }
  // Sort each adjacency row by neighbour, carrying edge ids along.
  std::vector<std::pair<VertexId, EdgeId>> row;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    row.clear();
    for (auto i = g.offsets_[v]; i < g.offsets_[v + 1]; ++i) {
      row.emplace_back(g.neighbors_[i], g.incident_[i]);
    }
    std::sort(row.begin(), row.end());
    for (std::size_t j = 0; j < row.size(); ++j) {
      g.neighbors_[g.offsets_[v] + j] = row[j].first;
      g.incident_[g.offsets_[v] + j] = row[j].second;
    }
  }
  g.edges_ = std::move(edges);
  return g;
}

std::optional<std::size_t> FiniteGraph::regular_degree() const noexcept {
  const auto n = vertex_count();
  if (n == 0) return std::nullopt;
  const auto d = degree(0);
  for (VertexId v = 1; v < n; ++v) {
    if (degree(v) != d) return std::nullopt;
  }
  return d;
}

bool FiniteGraph::is_connected() const {
  const auto n = vertex_count();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

std::optional<EdgeId> FiniteGraph::edge_id(VertexId a, VertexId b) const noexcept {
  if (a >= vertex_count() || b >= vertex_count()) return std::nullopt;
  auto nb = neighbors(a);
  auto it = std::lower_bound(nb.begin(), nb.end(), b);
  if (it == nb.end() || *it != b) return std::nullopt;
  return incident_edges(a)[static_cast<std::size_t>(it - nb.begin())];
}

void FiniteGraph::write_edge_list(std::ostream& os) const {
  for (const auto& e : edges_) os << e.u << ' ' << e.v << '\n';
}

namespace {

// Cursor over a spec string that reports the column of the first problem.
class SpecReader {
 public:
  SpecReader(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  std::uint64_t number(const char* what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{} || ptr == text_.data() + pos_) {
      throw SpecError(std::string("expected ") + what, base_ + pos_);
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_end() const {
    if (pos_ != text_.size()) throw SpecError("unexpected trailing characters", base_ + pos_);
  }
  std::size_t column() const { return base_ + pos_; }

 private:
  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

FiniteGraph build_circulant(std::uint64_t n, const std::vector<std::uint64_t>& steps,
                            std::string spec) {
  std::set<std::pair<VertexId, VertexId>> pairs;
  for (VertexId v = 0; v < n; ++v) {
    for (auto s : steps) {
      auto w = static_cast<VertexId>((v + s) % n);
      if (w == v) continue;
      pairs.emplace(std::min(v, w), std::max(v, w));
    }
  }
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) edges.push_back({a, b});
  return FiniteGraph::from_edges(n, std::move(edges), std::move(spec));
}

FiniteGraph parse_cycle(std::string_view body, std::size_t base, std::string spec) {
  SpecReader rd(body, base);
  auto col = rd.column();
  auto n = rd.number("cycle length");
  rd.expect_end();
  if (n < 3) throw SpecError("n below minimum (cycle needs n >= 3)", col);
  return build_circulant(n, {1}, std::move(spec));
}

FiniteGraph parse_torus(std::string_view body, std::size_t base, std::string spec) {
  SpecReader rd(body, base);
  std::vector<std::uint64_t> sides;
  do {
    auto col = rd.column();
    auto side = rd.number("torus side length");
    if (side < 3) throw SpecError("n below minimum (torus sides need n >= 3)", col);
    sides.push_back(side);
  } while (rd.consume('x'));
  rd.expect_end();
  if (sides.size() < 2) throw SpecError("torus needs at least two sides", base);

  std::uint64_t total = 1;
  for (auto s : sides) {
    total *= s;
    if (total > (1ull << 31)) throw SpecError("torus too large", base);
  }
  // Row-major: the last axis varies fastest.
  std::vector<std::uint64_t> stride(sides.size(), 1);
  for (std::size_t i = sides.size() - 1; i > 0; --i) stride[i - 1] = stride[i] * sides[i];

  std::vector<Edge> edges;
  edges.reserve(total * sides.size());
  for (std::uint64_t v = 0; v < total; ++v) {
    for (std::size_t axis = 0; axis < sides.size(); ++axis) {
      auto coord = (v / stride[axis]) % sides[axis];
      auto next = (coord + 1) % sides[axis];
      auto w = v + (next - coord) * stride[axis];  // wraps via unsigned arithmetic
      edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(w)});
    }
  }
  return FiniteGraph::from_edges(total, std::move(edges), std::move(spec));
}

FiniteGraph parse_circulant(std::string_view body, std::size_t base, std::string spec) {
  SpecReader rd(body, base);
  auto col = rd.column();
  auto n = rd.number("circulant order");
  if (n < 3) throw SpecError("n below minimum (circulant needs n >= 3)", col);
  if (n > (1ull << 31)) throw SpecError("circulant too large", col);
  if (!rd.consume(':')) throw SpecError("expected ':' before step list", rd.column());
  std::vector<std::uint64_t> steps;
  do {
    auto scol = rd.column();
    auto s = rd.number("step");
    if (s % n == 0) throw SpecError("step is a multiple of n (would create a loop)", scol);
    steps.push_back(s % n);
  } while (rd.consume(','));
  rd.expect_end();
  auto g = build_circulant(n, steps, std::move(spec));
  if (!g.is_connected()) {
    throw SpecError("circulant is disconnected (gcd of steps and n exceeds 1)", base);
  }
  return g;
}

}  // namespace

FiniteGraph generate(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw SpecError("missing ':' after family name", spec.size());
  auto family = spec.substr(0, colon);
  auto body = spec.substr(colon + 1);
  std::string label(spec);
  if (family == "cycle") return parse_cycle(body, colon + 1, label);
  if (family == "torus") return parse_torus(body, colon + 1, label);
  if (family == "circulant") return parse_circulant(body, colon + 1, label);
  if (family == "cayley") {
    if (body.empty()) throw SpecError("expected a file path", colon + 1);
    return load_cayley(std::string(body));
  }
  throw SpecError("unknown graph family '" + std::string(family) + "'", 0);
}

FiniteGraph load_cayley(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open Cayley table file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return cayley_from_text(buf.str(), "cayley:" + path);
}

FiniteGraph cayley_from_text(std::string_view text, std::string spec_string) {
  std::istringstream in{std::string(text)};
  long long n = 0, k = 0;
  if (!(in >> n >> k) || n < 1 || k < 1) throw SpecError("Cayley header must be `n k` with n, k >= 1");
  if (n > 4096) throw SpecError("Cayley group too large for table format");
  std::vector<std::uint32_t> mul(static_cast<std::size_t>(n * n));
  for (auto& x : mul) {
    long long value = -1;
    if (!(in >> value)) throw SpecError("truncated multiplication table");
    if (value < 0 || value >= n) throw SpecError("table entry out of range");
    x = static_cast<std::uint32_t>(value);
  }
  std::vector<std::uint32_t> gens(static_cast<std::size_t>(k));
  for (auto& x : gens) {
    long long value = -1;
    if (!(in >> value)) throw SpecError("missing generator indices");
    if (value < 0 || value >= n) throw SpecError("generator index out of range");
    x = static_cast<std::uint32_t>(value);
  }
  std::string rest;
  if (in >> rest) throw SpecError("unexpected trailing data in Cayley file");

  const auto N = static_cast<std::uint32_t>(n);
  auto at = [&](std::uint32_t a, std::uint32_t b) { return mul[std::size_t{a} * N + b]; };

  // Identity.
  std::optional<std::uint32_t> identity;
  for (std::uint32_t e = 0; e < N && !identity; ++e) {
    bool ok = true;
    for (std::uint32_t a = 0; a < N && ok; ++a) ok = at(e, a) == a && at(a, e) == a;
    if (ok) identity = e;
  }
  if (!identity) throw SpecError("table has no identity element");
  // Inverses.
  std::vector<std::uint32_t> inverse(N, N);
  for (std::uint32_t a = 0; a < N; ++a) {
    for (std::uint32_t b = 0; b < N; ++b) {
      if (at(a, b) == *identity && at(b, a) == *identity) {
        inverse[a] = b;
        break;
      }
    }
    if (inverse[a] == N) throw SpecError("element " + std::to_string(a) + " has no inverse");
  }
  // Associativity, O(n^3).
  for (std::uint32_t a = 0; a < N; ++a)
    for (std::uint32_t b = 0; b < N; ++b)
      for (std::uint32_t c = 0; c < N; ++c)
        if (at(at(a, b), c) != at(a, at(b, c))) throw SpecError("table is not associative");

  std::set<std::uint32_t> gen_set(gens.begin(), gens.end());
  for (auto s : gen_set) {
    if (s == *identity) throw SpecError("identity in generating set would create loops");
    if (!gen_set.count(inverse[s])) throw SpecError("generating set is not symmetric");
  }

  std::set<std::pair<VertexId, VertexId>> pairs;
  for (std::uint32_t a = 0; a < N; ++a) {
    for (auto s : gen_set) {
      auto b = at(a, s);
      pairs.emplace(std::min(a, b), std::max(a, b));
    }
  }
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) edges.push_back({a, b});
  auto g = FiniteGraph::from_edges(N, std::move(edges), std::move(spec_string));
  if (!g.is_connected()) throw SpecError("generators do not generate the group (graph disconnected)");
  return g;
}

}  // namespace perclab
