#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "doctest.h"
#include "perclab/geometry.hpp"
#include "perclab/metric.hpp"
#include "perclab/percolation.hpp"
#include "perclab/rng.hpp"

using namespace perclab;

namespace {

// Is there a path from `from` to any vertex of `to` using only allowed vertices
// (the endpoints included)? Plain DFS, no shared code with the library BFS.
bool dfs_reaches(const FiniteGraph& g, VertexId from, const std::vector<char>& to, const std::vector<char>& allowed) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (to[v]) return true;
    for (auto w : g.neighbors(v))
      if (!seen[w] && allowed[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return false;
}

std::vector<char> mask(const FiniteGraph& g, const std::vector<VertexId>& s) {
  std::vector<char> m(g.vertex_count(), 0);
  for (auto v : s) m[v] = 1;
  return m;
}

bool separates(const FiniteGraph& g, const std::vector<VertexId>& cut, const std::vector<VertexId>& a,
               const std::vector<VertexId>& b) {
  auto allowed = mask(g, cut);
  for (auto& x : allowed) x = !x;
  const auto target = mask(g, b);
  for (auto s : a)
    if (dfs_reaches(g, s, target, allowed)) return false;
  return true;
}

// Exposed sphere straight from the definition: u in S_n with a neighbour
// outside B_n from which S_{2n+1} is reachable while staying outside B_n.
std::vector<VertexId> brute_exposed(const FiniteGraph& g, int n) {
  const auto d = bfs_distances(g, 0);
  std::vector<char> outside(g.vertex_count()), far(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    outside[v] = d[v] > n;
    far[v] = d[v] == 2 * n + 1;
  }
  std::vector<VertexId> out;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (d[u] != n) continue;
    for (auto w : g.neighbors(u))
      if (outside[w] && dfs_reaches(g, w, far, outside)) {
        out.push_back(u);
        break;
      }
  }
  return out;
}

std::vector<EdgeId> cycle_edges(const FiniteGraph& g, const std::vector<VertexId>& c) {
  std::vector<EdgeId> e;
  for (std::size_t i = 0; i < c.size(); ++i) e.push_back(*g.edge_id(c[i], c[(i + 1) % c.size()]));
  return e;
}

// All simple cycles (as vertex sequences), each once, by DFS from the
// smallest vertex. Only for tiny graphs.
std::vector<std::vector<VertexId>> all_cycles(const FiniteGraph& g) {
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> path;
  std::vector<char> on(g.vertex_count(), 0);
  std::function<void(VertexId, VertexId)> go = [&](VertexId start, VertexId v) {
    for (auto w : g.neighbors(v)) {
      if (w == start && path.size() >= 3 && path[1] < path.back()) out.push_back(path);
      if (w <= start || on[w]) continue;
      on[w] = 1;
      path.push_back(w);
      go(start, w);
      path.pop_back();
      on[w] = 0;
    }
  };
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    path = {s};
    on[s] = 1;
    go(s, s);
    on[s] = 0;
  }
  return out;
}

// delta(G) by enumeration: smallest k such that cycles of extrinsic
// diameter <= k span the cycle space.
int exact_delta(const FiniteGraph& g) {
  const auto cycles = all_cycles(g);
  std::vector<std::vector<int>> dist;
  for (VertexId v = 0; v < g.vertex_count(); ++v) dist.push_back(bfs_distances(g, v));
  const std::size_t full = g.edge_count() - g.vertex_count() + 1;
  for (int k = 0;; ++k) {
    std::vector<std::vector<EdgeId>> small;
    for (const auto& c : cycles) {
      int diam = 0;
      for (auto a : c)
        for (auto b : c) diam = std::max(diam, dist[a][b]);
      if (diam <= k) small.push_back(cycle_edges(g, c));
    }
    if (gf2_rank(g.edge_count(), small) == full) return k;
  }
}

}  // namespace

TEST_CASE("exposed spheres against the definition") {
  auto c12 = generate("cycle:12");
  CHECK(exposed_sphere(c12, 0, 2).members == std::vector<VertexId>{2, 10});
  auto t16 = generate("torus:16x16");
  CHECK(exposed_sphere(t16, 0, 3).members == sphere(t16, 0, 3));
  for (const char* spec : {"circulant:30:2,3", "torus:6x10", "cycle:31", "torus:3x3x5", "circulant:40:1,9"}) {
    auto g = generate(spec);
    const int D = metric_profile(g, 0).diameter;
    for (int n = 1; 2 * n + 1 <= D; ++n) {
      auto ex = exposed_sphere(g, 0, n);
      CHECK_FALSE(ex.sphere_out_of_range);
      CHECK(ex.members == brute_exposed(g, n));
      // it is an (o, S_{2n+1})-cutset and removing any member opens a path
      const auto far = sphere(g, 0, 2 * n + 1);
      CHECK(separates(g, ex.members, {0}, far));
      for (std::size_t i = 0; i < ex.members.size(); ++i) {
        auto smaller = ex.members;
        smaller.erase(smaller.begin() + static_cast<long>(i));
        CHECK_FALSE(separates(g, smaller, {0}, far));
      }
    }
  }
  CHECK(exposed_sphere(c12, 0, 3).sphere_out_of_range);
}

TEST_CASE("r-connectedness") {
  auto c12 = generate("cycle:12");
  std::vector<VertexId> one{4};
  CHECK(is_r_connected(c12, one, 0).connected);
  std::vector<VertexId> pair{0, 6};
  auto split = is_r_connected(c12, pair, 5);
  CHECK_FALSE(split.connected);
  CHECK(split.side_a == std::vector<VertexId>{0});
  CHECK(split.side_b == std::vector<VertexId>{6});
  CHECK(is_r_connected(c12, pair, 6).connected);
  auto t8 = generate("torus:8x8");
  CHECK(is_r_connected(t8, sphere(t8, 0, 2), 2).connected);
  CHECK_FALSE(is_r_connected(t8, sphere(t8, 0, 2), 1).connected);
}

TEST_CASE("removal components") {
  auto c12 = generate("cycle:12");
  std::vector<VertexId> none, rest;
  for (VertexId v = 0; v < 12; ++v) rest.push_back(v);
  CHECK(removal_components(c12, none, rest).parts.size() == 1);
  std::vector<VertexId> cut{0, 6};
  auto parts = removal_components(c12, cut, rest);
  CHECK(parts.probe_overlap_dropped);
  REQUIRE(parts.parts.size() == 2);
  CHECK(parts.parts[0] == std::vector<VertexId>{1, 2, 3, 4, 5});
  CHECK(parts.parts[1] == std::vector<VertexId>{7, 8, 9, 10, 11});
  auto t16 = generate("torus:16x16");
  auto prof = metric_profile(t16, 0);
  std::vector<VertexId> outside;
  for (VertexId v = 0; v < t16.vertex_count(); ++v)
    if (prof.distances[v] > 4) outside.push_back(v);
  CHECK_FALSE(removal_components(t16, ball(prof, 2), outside).disconnects());
}

TEST_CASE("cutset audits") {
  auto c12 = generate("cycle:12");
  std::vector<VertexId> cut{2, 10}, a{0}, b{5};
  auto rep = cutset_audit(c12, cut, a, b);
  CHECK(rep.is_cutset);
  CHECK(rep.is_minimal);
  CHECK(is_r_connected(c12, cut, 4).connected);
  CHECK_FALSE(is_r_connected(c12, cut, 3).connected);

  auto t = generate("torus:5x5");
  std::vector<VertexId> src{0}, dst{12}, everything;
  for (VertexId v = 1; v < 25; ++v)
    if (v != 12) everything.push_back(v);
  auto sup = cutset_audit(t, everything, src, dst);
  CHECK(sup.is_cutset);
  CHECK_FALSE(sup.is_minimal);
  REQUIRE(sup.removable.has_value());
  auto without = everything;
  without.erase(std::find(without.begin(), without.end(), *sup.removable));
  CHECK(separates(t, without, src, dst));

  std::vector<VertexId> empty;
  auto open = cutset_audit(t, empty, src, dst);
  CHECK_FALSE(open.is_cutset);
  REQUIRE(open.violating_path.size() >= 2);
  CHECK(open.violating_path.front() == 0);
  CHECK(open.violating_path.back() == 12);
  check_walk(t, open.violating_path);

  std::vector<VertexId> overlap{0};
  CHECK_THROWS_AS(cutset_audit(t, overlap, src, dst), std::invalid_argument);
}

TEST_CASE("minimality audit matches single-vertex removal") {
  auto g = generate("circulant:16:1,4");
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VertexId> cut;
    for (VertexId v = 2; v < 16; ++v)
      if (v != 9 && rng.unit() < 0.4) cut.push_back(v);
    std::vector<VertexId> a{0, 1}, b{9};
    auto rep = cutset_audit(g, cut, a, b);
    CHECK(rep.is_cutset == separates(g, cut, a, b));
    if (!rep.is_cutset) continue;
    bool minimal = true;
    for (std::size_t i = 0; i < cut.size(); ++i) {
      auto smaller = cut;
      smaller.erase(smaller.begin() + static_cast<long>(i));
      minimal &= !separates(g, smaller, a, b);
    }
    CHECK(rep.is_minimal == minimal);
  }
}

TEST_CASE("random minimal cutsets are minimal and delta-connected") {
  for (const char* spec : {"cycle:20", "torus:6x6", "torus:4x12", "circulant:30:2,3", "circulant:26:1,5"}) {
    auto g = generate(spec);
    auto bracket = delta_bracket(g);
    REQUIRE(bracket.determined);
    int produced = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
      auto inst = random_minimal_cutset(g, s);
      if (!inst) continue;
      ++produced;
      CHECK(separates(g, inst->cutset, inst->source, inst->target));
      auto rep = cutset_audit(g, inst->cutset, inst->source, inst->target);
      CHECK(rep.is_minimal);
      CHECK(is_r_connected(g, inst->cutset, bracket.delta_upper).connected);
    }
    CHECK(produced > 0);
  }
}

TEST_CASE("gf2 rank") {
  auto g = generate("torus:3x3");
  auto cycles = all_cycles(g);
  std::vector<std::vector<EdgeId>> vecs;
  for (const auto& c : cycles) vecs.push_back(cycle_edges(g, c));
  CHECK(gf2_rank(g.edge_count(), vecs) == g.edge_count() - g.vertex_count() + 1);
  // brute force: the span of 10 random vectors has 2^rank elements
  SplitMix64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<EdgeId>> some;
    std::vector<std::uint32_t> words;
    for (int i = 0; i < 10; ++i) {
      std::vector<EdgeId> v;
      std::uint32_t w = 0;
      for (EdgeId e = 0; e < 12; ++e)
        if (rng.unit() < 0.3) v.push_back(e), w |= 1u << e;
      some.push_back(v);
      words.push_back(w);
    }
    std::set<std::uint32_t> span;
    for (std::uint32_t m = 0; m < (1u << 10); ++m) {
      std::uint32_t x = 0;
      for (int i = 0; i < 10; ++i)
        if (m >> i & 1) x ^= words[i];
      span.insert(x);
    }
    CHECK((std::size_t{1} << gf2_rank(12, some)) == span.size());
  }
}

TEST_CASE("cycle-space diameter brackets") {
  auto tree = FiniteGraph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}, "tree");
  auto t = delta_bracket(tree);
  CHECK(t.trivial);
  CHECK(t.delta_lower == 0);
  CHECK(t.delta_upper == 0);
  for (int n : {5, 12, 13, 40}) {
    auto b = delta_bracket(generate("cycle:" + std::to_string(n)));
    CHECK(b.determined);
    CHECK(b.delta_lower == n / 2);
    CHECK(b.delta_upper == n / 2);
  }
  auto t44 = delta_bracket(generate("torus:4x4"));
  CHECK(t44.rank_full == 17);
  CHECK(t44.delta_lower <= 2);
  CHECK(t44.delta_upper >= 2);
  for (const char* spec : {"torus:3x3", "torus:3x4", "circulant:8:1,2", "circulant:10:1,3", "circulant:9:1,3"}) {
    auto g = generate(spec);
    auto b = delta_bracket(g);
    const int exact = exact_delta(g);
    CHECK(b.delta_lower <= exact);
    CHECK(exact <= b.delta_upper);
  }
  DeltaBudget tight;
  tight.max_edges = 10;
  CHECK_FALSE(delta_bracket(generate("torus:8x8"), tight).determined);
}

TEST_CASE("tube packing") {
  auto c12 = generate("cycle:12");
  auto f0 = plentiful_tubes(c12, 0, 1, 2, 0, 3);
  CHECK(f0.tubes.size() == 2);
  CHECK(f0.success);
  CHECK(verify_tubes(c12, f0, sphere(c12, 0, 1), sphere(c12, 0, 4)));
  // both arcs' 1-neighbourhoods contain v0, so at most one tube
  auto f1 = plentiful_tubes(c12, 0, 1, 2, 1, 3);
  CHECK(f1.tubes.size() == 1);
  CHECK_FALSE(f1.success);
  auto t16 = generate("torus:16x16");
  auto f = plentiful_tubes(t16, 0, 2, 2, 1, 10);
  CHECK(f.tubes.size() >= 2);
  CHECK(verify_tubes(t16, f, sphere(t16, 0, 2), sphere(t16, 0, 8)));
  CHECK_THROWS_AS(plentiful_tubes(c12, 0, 2, 1, 0, 10), InfeasibleError);
  // tampering is caught
  auto bad = f;
  bad.tubes.push_back(bad.tubes.front());
  CHECK_FALSE(verify_tubes(t16, bad, sphere(t16, 0, 2), sphere(t16, 0, 8)));
  auto shortl = f;
  shortl.l = 1;
  CHECK_FALSE(verify_tubes(t16, shortl, sphere(t16, 0, 2), sphere(t16, 0, 8)));
}

TEST_CASE("dense cycles and GH upper bounds") {
  auto c100 = generate("cycle:100");
  auto w = dense_cycle_certificate(c100);
  REQUIRE(w.has_value());
  CHECK(w->cycle.size() == 100);
  CHECK(w->density == 0);
  CHECK(w->defect == 0);
  auto up = gh_circle_upper(c100);
  CHECK(up.value == doctest::Approx(2 * std::numbers::pi / 100));
  CHECK(verify_upper(c100, up));
  CHECK(gh_circle_upper(generate("cycle:200")).value <= 0.04);

  auto t464 = generate("torus:4x64");
  auto w2 = dense_cycle_certificate(t464);
  REQUIRE(w2.has_value());
  CHECK(w2->cycle.size() == 64);
  CHECK(w2->density <= 2);
  auto up2 = gh_circle_upper(t464);
  CHECK(up2.value < 1.0);
  CHECK_FALSE(up2.trivial);
  CHECK(verify_upper(t464, up2));

  auto t16 = generate("torus:16x16");
  CHECK_FALSE(dense_cycle_certificate(t16).has_value());
  auto triv = gh_circle_upper(t16);
  CHECK(triv.trivial);
  CHECK(triv.value == kTrivialGH);
  CHECK(verify_upper(t16, triv));

  auto forged = up;
  forged.value = 0.01;
  CHECK_FALSE(verify_upper(c100, forged));
  auto broken = up2;
  std::swap(broken.cycle->cycle[3], broken.cycle->cycle[20]);
  CHECK_FALSE(verify_upper(t464, broken));
}

TEST_CASE("GH lower bounds") {
  auto t16 = generate("torus:16x16");
  // explicit 6-point packing: pairwise L1 torus distance >= 8
  std::vector<std::pair<int, int>> pts{{0, 0}, {8, 0}, {0, 8}, {8, 8}, {4, 4}, {12, 4}};
  std::vector<VertexId> ids;
  for (auto [x, y] : pts) ids.push_back(static_cast<VertexId>(x * 16 + y));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto d = bfs_distances(t16, ids[i]);
    for (std::size_t j = i + 1; j < ids.size(); ++j) CHECK(d[ids[j]] >= 8);
  }
  // eps = pi * 8 / 16 = pi/2; 6 points beat floor(2 pi / eps) = 4: bound (pi/2 - 2 pi / 6) / 2
  const double oracle = (std::numbers::pi / 2 - 2 * std::numbers::pi / 6) / 2;
  GHCertificate manual;
  manual.kind = GHCertificate::Kind::kLower;
  manual.diameter = 16;
  manual.packing = ids;
  manual.separation = 8;
  manual.epsilon = std::numbers::pi / 2;
  manual.value = oracle;
  CHECK(verify_lower(t16, manual));
  auto low = gh_circle_lower(t16);
  CHECK(low.value >= 0.2);
  CHECK(low.value >= oracle - 1e-12);
  CHECK(verify_lower(t16, low));
  auto lied = low;
  lied.value += 0.1;
  CHECK_FALSE(verify_lower(t16, lied));
  auto crowded = low;
  crowded.packing.push_back(crowded.packing.front() + 1);
  CHECK_FALSE(verify_lower(t16, crowded));

  for (int n : {12, 30}) CHECK(gh_circle_lower(generate("cycle:" + std::to_string(n))).value <= 1e-12);
  // odd cycle: rescaled circumference 2 pi (1 + 1/100), so a sliver of bound
  CHECK(gh_circle_lower(generate("cycle:101")).value < 0.001);
  CHECK(gh_circle_lower(generate("torus:4x64")).value <= 0.2);
}

TEST_CASE("GH sandwich and gamma") {
  for (const char* spec : {"cycle:12", "cycle:30", "torus:4x4", "torus:8x8", "torus:6x10", "torus:4x64",
                           "circulant:30:2,3", "circulant:20:1,5"}) {
    auto g = generate(spec);
    auto up = gh_circle_upper(g);
    auto low = gh_circle_lower(g);
    CHECK(low.value <= up.value);
    auto q = gamma_quantities(g, up, low);
    CHECK(q.gamma_high <= std::numbers::pi * q.diameter);
    CHECK(q.gamma_low <= q.gamma_high);
  }
  auto c100 = gamma_quantities(generate("cycle:100"));
  CHECK(c100.gamma_high == doctest::Approx(2 * std::numbers::pi / 100 * 50));
  CHECK(c100.circle_like_fast);
  auto t16 = gamma_quantities(generate("torus:16x16"));
  CHECK(t16.gamma_low >= 0.24 * 16);
  CHECK(t16.exceeds_graph);
  CHECK_FALSE(t16.circle_like_fast);
}
