#include "perclab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "perclab/metric.hpp"
#include "perclab/percolation.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

std::vector<char> mask_of(const FiniteGraph& g, std::span<const VertexId> set) {
  std::vector<char> mask(g.vertex_count(), 0);
  for (auto v : set) {
    if (v >= g.vertex_count()) throw std::out_of_range("vertex out of range");
    mask[v] = 1;
  }
  return mask;
}

// BFS from `sources` over vertices with allowed[v]; returns the parent array
// (kNone for unreached, the vertex itself for sources).
constexpr VertexId kNone = ~VertexId{0};

std::vector<VertexId> bfs_forest(const FiniteGraph& g, std::span<const VertexId> sources,
                                 const std::vector<char>& allowed) {
  std::vector<VertexId> parent(g.vertex_count(), kNone);
  std::deque<VertexId> queue;
  for (auto s : sources) {
    if (!allowed[s] || parent[s] != kNone) continue;
    parent[s] = s;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (auto w : g.neighbors(x)) {
      if (!allowed[w] || parent[w] != kNone) continue;
      parent[w] = x;
      queue.push_back(w);
    }
  }
  return parent;
}

std::vector<VertexId> trace(const std::vector<VertexId>& parent, VertexId end) {
  std::vector<VertexId> path{end};
  while (parent[path.back()] != path.back()) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<VertexId> sorted_unique(std::span<const VertexId> s) {
  std::vector<VertexId> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

ExposedSphere exposed_sphere(const FiniteGraph& g, VertexId root, int n) {
  if (n < 1) throw std::invalid_argument("exposed sphere needs n >= 1");
  if (root >= g.vertex_count()) throw std::out_of_range("root out of range");
  ExposedSphere out;
  out.root = root;
  out.n = n;
  const auto dist = bfs_distances(g, root);
  std::vector<VertexId> far;
  std::vector<char> outside(g.vertex_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    outside[v] = dist[v] != kUnreached && dist[v] > n;
    if (dist[v] == 2 * n + 1) far.push_back(v);
  }
  if (far.empty()) {
    out.sphere_out_of_range = true;
    return out;
  }
  const auto reach = bfs_forest(g, far, outside);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (dist[v] != n) continue;
    for (auto w : g.neighbors(v)) {
      if (reach[w] != kNone) {
        out.members.push_back(v);
        break;
      }
    }
  }
  return out;
}

RConnectedness is_r_connected(const FiniteGraph& g, std::span<const VertexId> set, int r) {
  const auto members = sorted_unique(set);
  if (members.empty()) throw std::invalid_argument("r-connectedness of an empty set");
  RConnectedness out;
  UnionFind uf(members.size());
  for (std::uint32_t i = 0; i < members.size(); ++i) {
    const VertexId src[] = {members[i]};
    const auto dist = bfs_distances(g, src, std::max(r, 0));
    for (std::uint32_t j = i + 1; j < members.size(); ++j)
      if (dist[members[j]] != kUnreached) uf.unite(i, j);
  }
  if (uf.components() == 1) return out;
  out.connected = false;
  const auto first = uf.find(0);
  for (std::uint32_t i = 0; i < members.size(); ++i)
    (uf.find(i) == first ? out.side_a : out.side_b).push_back(members[i]);
  return out;
}

RemovalComponents removal_components(const FiniteGraph& g, std::span<const VertexId> removed,
                                     std::span<const VertexId> probe) {
  const auto gone = mask_of(g, removed);
  std::vector<char> allowed(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) allowed[v] = !gone[v];
  RemovalComponents out;
  const auto probes = sorted_unique(probe);
  std::vector<std::uint32_t> comp(g.vertex_count(), ~0u);
  std::vector<std::uint32_t> part_of_comp;
  std::uint32_t next = 0;
  for (auto p : probes) {
    if (p >= g.vertex_count()) throw std::out_of_range("vertex out of range");
    if (gone[p]) {
      out.probe_overlap_dropped = true;
      continue;
    }
    if (comp[p] == ~0u) {
      const VertexId src[] = {p};
      const auto parent = bfs_forest(g, src, allowed);
      for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (parent[v] != kNone) comp[v] = next;
      ++next;
      part_of_comp.push_back(static_cast<std::uint32_t>(out.parts.size()));
      out.parts.emplace_back();
    }
    out.parts[part_of_comp[comp[p]]].push_back(p);
  }
  return out;
}

CutsetReport cutset_audit(const FiniteGraph& g, std::span<const VertexId> cutset, std::span<const VertexId> source,
                          std::span<const VertexId> target) {
  CutsetReport out;
  out.cutset = sorted_unique(cutset);
  out.source = sorted_unique(source);
  out.target = sorted_unique(target);
  const auto cut = mask_of(g, out.cutset);
  const auto src = mask_of(g, out.source);
  const auto dst = mask_of(g, out.target);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if ((cut[v] && src[v]) || (cut[v] && dst[v]) || (src[v] && dst[v]))
      throw std::invalid_argument("cutset, source and target must be pairwise disjoint");

  std::vector<char> allowed(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) allowed[v] = !cut[v];
  const auto from_a = bfs_forest(g, out.source, allowed);
  for (auto t : out.target) {
    if (from_a[t] != kNone) {
      out.violating_path = trace(from_a, t);
      return out;
    }
  }
  out.is_cutset = true;
  const auto from_b = bfs_forest(g, out.target, allowed);
  out.is_minimal = true;
  for (auto c : out.cutset) {
    bool near_a = false, near_b = false;
    for (auto w : g.neighbors(c)) {
      near_a |= from_a[w] != kNone;
      near_b |= from_b[w] != kNone;
    }
    if (!(near_a && near_b)) {
      out.is_minimal = false;
      out.removable = c;
      break;
    }
  }
  return out;
}

std::optional<CutsetInstance> random_minimal_cutset(const FiniteGraph& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const auto nv = g.vertex_count();
  if (nv < 3) return std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto a = static_cast<VertexId>(rng.below(nv));
    const auto dist_a = bfs_distances(g, a);
    int ecc = 0;
    for (auto d : dist_a) ecc = std::max(ecc, d);
    if (ecc < 2) continue;
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, ecc / 2))));
    const int j = static_cast<int>(rng.below(2));
    std::vector<VertexId> far;
    for (VertexId v = 0; v < nv; ++v)
      if (dist_a[v] > k + j) far.push_back(v);
    if (far.empty()) continue;
    const auto b = far[rng.below(far.size())];
    const auto dist_b = bfs_distances(g, b);

    CutsetInstance inst;
    std::vector<char> outside(nv, 0);
    for (VertexId v = 0; v < nv; ++v) {
      if (dist_a[v] <= k - 1) inst.source.push_back(v);
      if (dist_b[v] <= j) inst.target.push_back(v);
      outside[v] = dist_a[v] > k;
    }
    const auto reach = bfs_forest(g, inst.target, outside);
    for (VertexId v = 0; v < nv; ++v) {
      if (dist_a[v] != k) continue;
      for (auto w : g.neighbors(v)) {
        if (reach[w] != kNone) {
          inst.cutset.push_back(v);
          break;
        }
      }
    }
    if (inst.cutset.empty()) continue;
    return inst;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- cycle space

namespace {

class Gf2Basis {
 public:
  explicit Gf2Basis(std::size_t bits) : words_((bits + 63) / 64), pivot_row_(bits, -1) {}

  /// Returns true if the vector was independent (and is now in the basis).
  bool insert(std::vector<std::uint64_t> v) {
    for (;;) {
      std::size_t w = 0;
      while (w < words_ && v[w] == 0) ++w;
      if (w == words_) return false;
      const auto bit = w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
      const int row = pivot_row_[bit];
      if (row < 0) {
        pivot_row_[bit] = static_cast<int>(rows_.size());
        rows_.push_back(std::move(v));
        return true;
      }
      const auto& r = rows_[row];
      for (std::size_t i = w; i < words_; ++i) v[i] ^= r[i];
    }
  }
  std::size_t rank() const { return rows_.size(); }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<int> pivot_row_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

std::vector<std::uint64_t> to_bits(std::size_t edge_count, std::span<const EdgeId> edges) {
  std::vector<std::uint64_t> v((edge_count + 63) / 64, 0);
  for (auto e : edges) v[e / 64] ^= std::uint64_t{1} << (e % 64);
  return v;
}

struct Candidate {
  std::vector<EdgeId> edges;
  int diameter = 0;
};

}  // namespace

std::size_t gf2_rank(std::size_t edge_count, const std::vector<std::vector<EdgeId>>& cycles) {
  Gf2Basis basis(edge_count);
  for (const auto& c : cycles) basis.insert(to_bits(edge_count, c));
  return basis.rank();
}

CycleSpaceBracket delta_bracket(const FiniteGraph& g, const DeltaBudget& budget) {
  CycleSpaceBracket out;
  const auto nv = g.vertex_count();
  const auto ne = g.edge_count();
  UnionFind uf(nv);
  for (const auto& e : g.edges()) uf.unite(e.u, e.v);
  out.rank_full = ne + uf.components() - nv;
  if (out.rank_full == 0) {
    out.determined = true;
    out.trivial = true;
    out.note = "empty cycle space";
    return out;
  }
  if (nv > budget.max_vertices || ne > budget.max_edges) {
    out.note = "not determined: graph exceeds budget";
    return out;
  }

  // All-pairs distances (the ball structure of every vertex is needed).
  std::vector<std::vector<int>> dist(nv);
  int max_ecc = 0;
  for (VertexId v = 0; v < nv; ++v) {
    dist[v] = bfs_distances(g, v);
    for (auto d : dist[v])
      if (d != kUnreached) max_ecc = std::max(max_ecc, d);
  }
  auto parent_of = [&](VertexId root, VertexId x) {
    for (auto w : g.neighbors(x))
      if (dist[root][w] == dist[root][x] - 1) return w;
    return x;
  };

  Gf2Basis basis(ne);
  std::vector<Candidate> candidates;
  double work = 0.0;
  const auto edges = g.edges();
  for (int m = 1; m <= max_ecc && basis.rank() < out.rank_full; ++m) {
    for (VertexId v = 0; v < nv && basis.rank() < out.rank_full; ++v) {
      const auto& dv = dist[v];
      for (EdgeId e = 0; e < ne; ++e) {
        const auto [x0, y0] = edges[e];
        const int dx = dv[x0], dy = dv[y0];
        if (dx == kUnreached || std::max(dx, dy) != m) continue;
        if (parent_of(v, x0) == y0 || parent_of(v, y0) == x0) continue;  // tree edge
        Candidate c;
        c.edges.push_back(e);
        std::vector<VertexId> verts{x0, y0};
        VertexId x = x0, y = y0;
        while (x != y) {
          if (dv[x] >= dv[y]) {
            const auto px = parent_of(v, x);
            c.edges.push_back(*g.edge_id(x, px));
            x = px;
            verts.push_back(x);
          } else {
            const auto py = parent_of(v, y);
            c.edges.push_back(*g.edge_id(y, py));
            y = py;
            verts.push_back(y);
          }
        }
        for (std::size_t i = 0; i < verts.size(); ++i)
          for (std::size_t j = i + 1; j < verts.size(); ++j) c.diameter = std::max(c.diameter, dist[verts[i]][verts[j]]);
        work += static_cast<double>(basis.rank() + 1) * static_cast<double>(basis.words());
        if (work > budget.max_work) {
          out.note = "not determined: work budget exceeded at radius " + std::to_string(m);
          out.delta_lower = m;  // every radius below m failed to generate
          return out;
        }
        basis.insert(to_bits(ne, c.edges));
        candidates.push_back(std::move(c));
        if (basis.rank() == out.rank_full) break;
      }
    }
    if (basis.rank() == out.rank_full) out.generating_radius = m;
  }
  if (basis.rank() < out.rank_full) {
    out.note = "not determined: ball cycle spaces do not span";
    return out;
  }
  const int m_star = out.generating_radius;
  out.delta_lower = m_star;

  // Smallest maximal diameter over spanning subfamilies of the candidates
  // (greedy is optimal on a matroid).
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].diameter < candidates[b].diameter; });
  Gf2Basis refined(ne);
  int reached = 2 * m_star;
  for (auto i : order) {
    refined.insert(to_bits(ne, candidates[i].edges));
    if (refined.rank() == out.rank_full) {
      reached = candidates[i].diameter;
      break;
    }
  }
  out.delta_upper = std::min(2 * m_star, reached);
  out.delta_lower = std::min(out.delta_lower, out.delta_upper);
  out.determined = true;
  return out;
}

// ---------------------------------------------------------------- tubes

TubeFamily plentiful_tubes(const FiniteGraph& g, std::span<const VertexId> from, std::span<const VertexId> to, int k,
                           int r, int l) {
  if (k < 0 || r < 0 || l < 0) throw std::invalid_argument("k, r, l must be >= 0");
  TubeFamily out;
  out.k = k;
  out.r = r;
  out.l = l;
  out.endpoints = "sets";
  const auto targets = mask_of(g, to);
  std::vector<char> residual(g.vertex_count(), 1);
  for (;;) {
    // the first target dequeued ends a shortest residual path
    VertexId best = kNone;
    int best_len = 0;
    std::vector<int> depth(g.vertex_count(), -1);
    {
      std::deque<VertexId> queue;
      for (auto s : from)
        if (residual[s] && depth[s] < 0) {
          depth[s] = 0;
          queue.push_back(s);
        }
      std::vector<VertexId> par(g.vertex_count(), kNone);
      for (auto s : queue) par[s] = s;
      while (!queue.empty()) {
        const auto x = queue.front();
        queue.pop_front();
        if (targets[x]) {
          best = x;
          best_len = depth[x];
          out.tubes.push_back(trace(par, x));
          break;
        }
        for (auto w : g.neighbors(x)) {
          if (!residual[w] || depth[w] >= 0) continue;
          depth[w] = depth[x] + 1;
          par[w] = x;
          queue.push_back(w);
        }
      }
    }
    if (best == kNone) break;
    if (best_len > l) {
      out.tubes.pop_back();
      break;
    }
    const auto near = bfs_distances(g, out.tubes.back(), 2 * r);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (near[v] != kUnreached) residual[v] = 0;
  }
  out.success = static_cast<int>(out.tubes.size()) >= k;
  return out;
}

TubeFamily plentiful_tubes(const FiniteGraph& g, VertexId root, int n, int k, int r, int l) {
  if (n < 1) throw std::invalid_argument("tube scale n must be >= 1");
  const auto profile = metric_profile(g, root);
  if (4 * n > profile.diameter) throw InfeasibleError("scale infeasible: 4n exceeds the diameter");
  const auto a = sphere(profile, n);
  const auto b = sphere(profile, 4 * n);
  auto out = plentiful_tubes(g, a, b, k, r, l);
  out.n = n;
  out.endpoints = "spheres";
  return out;
}

bool verify_tubes(const FiniteGraph& g, const TubeFamily& family, std::span<const VertexId> from,
                  std::span<const VertexId> to) {
  const auto a = mask_of(g, from);
  const auto b = mask_of(g, to);
  for (const auto& t : family.tubes) {
    if (t.empty() || !a[t.front()] || !b[t.back()]) return false;
    if (static_cast<int>(t.size()) - 1 > family.l) return false;
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!g.edge_id(t[i - 1], t[i])) return false;
  }
  for (std::size_t i = 0; i < family.tubes.size(); ++i) {
    const auto di = bfs_distances(g, family.tubes[i], 2 * family.r);
    for (std::size_t j = i + 1; j < family.tubes.size(); ++j)
      for (auto v : family.tubes[j])
        if (di[v] != kUnreached) return false;
  }
  return family.success == (static_cast<int>(family.tubes.size()) >= family.k);
}

}  // namespace perclab
