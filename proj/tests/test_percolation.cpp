#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "perclab/kernels.hpp"
#include "perclab/metric.hpp"
#include "perclab/parallel.hpp"
#include "perclab/percolation.hpp"

using namespace perclab;

namespace {

// Component sizes by BFS over open edges; the oracle for union-find.
std::vector<std::size_t> bfs_component_sizes(const FiniteGraph& g, const Config& c, std::vector<int>& comp) {
  comp.assign(g.vertex_count(), -1);
  std::vector<std::size_t> sizes;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::vector<VertexId> stack{s};
    comp[s] = id;
    std::size_t count = 0;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      ++count;
      auto nb = g.neighbors(v);
      auto ie = g.incident_edges(v);
      for (std::size_t i = 0; i < nb.size(); ++i)
        if (c.open[ie[i]] && comp[nb[i]] < 0) {
          comp[nb[i]] = id;
          stack.push_back(nb[i]);
        }
    }
    sizes.push_back(count);
  }
  return sizes;
}

Config random_config(const FiniteGraph& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Config c = Config::all(g, false);
  const double p = rng.unit();
  for (auto& o : c.open) o = rng.unit() < p;
  return c;
}

}  // namespace

TEST_CASE("philox known answers") {
  using P = Philox4x32;
  CHECK(P::apply({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(P::apply({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(P::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
  const auto& scalar = kernels::scalar_table();
  const auto* simd = kernels::avx2_table();
  if (!simd || !kernels::cpu_has_avx2()) {
    MESSAGE("AVX2 unavailable, equivalence skipped");
    return;
  }
  for (std::uint32_t len : {0u, 1u, 3u, 4u, 7u, 8u, 31u, 1000u, 4097u}) {
    for (std::uint32_t first : {0u, 1u, 5u, 0xFFFFFF00u}) {
      StreamKey key{0x1234ABCDull * (len + 1), first, Stream::kGhosts};
      std::vector<double> a(len), b(len);
      scalar.fill_uniform(key, first, a);
      simd->fill_uniform(key, first, b);
      CHECK(std::memcmp(a.data(), b.data(), len * sizeof(double)) == 0);
      for (std::uint32_t i = 0; i < len; ++i) CHECK(a[i] == uniform_at(key, first + i));
      for (double t : {-1.0, 0.0, 0.25, 0.5, a.empty() ? 0.7 : a[len / 2], 1.0}) {
        std::vector<std::uint8_t> ma(len), mb(len);
        CHECK(scalar.threshold_le(a, t, ma) == simd->threshold_le(a, t, mb));
        CHECK(ma == mb);
        CHECK(scalar.threshold_lt(a, t, ma) == simd->threshold_lt(a, t, mb));
        CHECK(ma == mb);
        CHECK(scalar.count_le(a, t) == simd->count_le(a, t));
      }
    }
  }
}

TEST_CASE("edge weights") {
  auto g = generate("torus:8x8");
  auto a = sample_weights(g, 42, 3), b = sample_weights(g, 42, 3), c = sample_weights(g, 43, 3);
  CHECK(a.weights == b.weights);
  CHECK(a.weights != c.weights);
  CHECK(a.weights != sample_weights(g, 42, 4).weights);
  resample(c, 42, 3);
  CHECK(c.weights == a.weights);

  auto big = generate("cycle:100000");
  auto w = sample_weights(big, 0xC1C1E5CA1E0F5EEDull, 0).weights;
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  CHECK(mean >= 0.497);
  CHECK(mean <= 0.503);
  CHECK(*std::min_element(w.begin(), w.end()) >= 0.0);
  CHECK(*std::max_element(w.begin(), w.end()) < 1.0);
}

TEST_CASE("config_at edge cases") {
  auto g = generate("torus:4x4");
  auto s = sample_weights(g, 1, 0);
  CHECK(config_at(s, 0.0).open_count() == 0);
  CHECK(config_at(s, -0.5).open_count() == 0);
  CHECK(config_at(s, 1.0).open_count() == g.edge_count());
  CHECK(config_at(s, 1.2).open == config_at(s, 1.0).open);
  s.weights[0] = 0.0;
  CHECK(config_at(s, 0.0).open_count() == 0);
  // monotone coupling
  for (double p = 0.0; p < 1.0; p += 0.05) {
    auto lo = config_at(s, p), hi = config_at(s, p + 0.05);
    for (std::size_t e = 0; e < lo.open.size(); ++e) CHECK(lo.open[e] <= hi.open[e]);
  }
  std::ostringstream os;
  write_open_edges(os, Config::from_edge_ids(g, std::vector<EdgeId>{5, 1}));
  CHECK(os.str() == "1\n5\n");
  std::vector<Edge> bad{{0, 5}};
  CHECK_THROWS_AS(Config::from_pairs(g, bad), std::invalid_argument);
}

TEST_CASE("union-find clusters equal BFS components") {
  for (const char* spec : {"cycle:8", "torus:4x4", "circulant:12:1,3", "torus:7x5", "circulant:50:3,7,11"}) {
    auto g = generate(spec);
    for (std::uint64_t t = 0; t < 50; ++t) {
      auto c = random_config(g, t * 7919 + g.edge_count());
      std::vector<int> comp;
      auto sizes = bfs_component_sizes(g, c, comp);
      auto rep = clusters(g, c);
      std::sort(sizes.rbegin(), sizes.rend());
      CHECK(rep.sorted_sizes() == sizes);
      CHECK(rep.k1 == sizes[0]);
      CHECK(rep.k2 == (sizes.size() > 1 ? sizes[1] : 0));
      for (VertexId u = 0; u < g.vertex_count(); ++u)
        for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK((rep.label[u] == rep.label[v]) == (comp[u] == comp[v]));
      CHECK(connected(g, c, 0, g.vertex_count() - 1) == (comp[0] == comp[g.vertex_count() - 1]));
    }
  }
}

TEST_CASE("cluster examples") {
  auto c6 = generate("cycle:6");
  auto all = clusters(c6, Config::all(c6, true));
  CHECK(all.k1 == 6);
  CHECK(all.k2 == 0);
  auto none = clusters(c6, Config::all(c6, false));
  CHECK(none.k1 == 1);
  CHECK(none.k2 == 1);
  std::vector<Edge> two{{0, 1}, {3, 4}};
  auto rep = clusters(c6, Config::from_pairs(c6, two));
  CHECK(rep.sorted_sizes() == std::vector<std::size_t>{2, 2, 1, 1});
  CHECK(rep.k1 == 2);
  CHECK(rep.k2 == 2);

  auto c4 = generate("cycle:4");
  CHECK(connected(c4, Config::all(c4, false), 2, 2));
  std::vector<Edge> one{{0, 1}};
  CHECK_FALSE(connected(c4, Config::from_pairs(c4, one), 0, 2));
}

TEST_CASE("evolution curve against direct configurations") {
  for (const char* spec : {"torus:6x6", "cycle:30", "circulant:40:1,9"}) {
    auto g = generate(spec);
    for (std::uint64_t t = 0; t < 10; ++t) {
      auto s = sample_weights(g, 99, t);
      auto curve = evolution_curve(g, s);
      CHECK(curve.k1_at_step.front() == 1);
      CHECK(curve.k1_at_step.back() == g.vertex_count());
      CHECK(std::is_sorted(curve.breakpoints.begin(), curve.breakpoints.end()));
      SplitMix64 rng(t);
      for (int i = 0; i < 5; ++i) {
        const double p = rng.unit();
        auto rep = clusters(g, config_at(s, p));
        CHECK(curve.k1_at(p) == rep.k1);
        CHECK(curve.k2_at(p) == rep.k2);
      }
      for (double p : curve.breakpoints) {
        CHECK(curve.k1_at(p) == clusters(g, config_at(s, p)).k1);
      }
      for (std::size_t level : {std::size_t{2}, g.vertex_count() / 2, g.vertex_count()}) {
        const double pc = curve.critical_p(level);
        CHECK(pc == critical_p(g, s, level));
        CHECK(clusters(g, config_at(s, pc)).k1 >= level);
        CHECK(clusters(g, config_at(s, std::nextafter(pc, 0.0))).k1 < level);
      }
    }
  }
}

TEST_CASE("ghost fields") {
  auto g = generate("torus:8x8");
  auto closed = Config::all(g, false);
  auto all = sample_ghost(g, 1.0, 5, 0);
  CHECK(all.count() == g.vertex_count());
  CHECK(ghost_connected(g, closed, all, 3));
  auto none = sample_ghost(g, 0.0, 5, 0);
  CHECK(none.count() == 0);
  CHECK_FALSE(ghost_connected(g, Config::all(g, true), none, 3));
  // at p = 0 only the vertex itself can be the witness: frequency ~ q
  const double q = 0.3;
  int hits = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) hits += ghost_connected(g, closed, sample_ghost(g, q, 17, t), 0);
  const double sigma = std::sqrt(q * (1 - q) / trials);
  CHECK(std::abs(hits / double(trials) - q) <= 3 * sigma);
}

TEST_CASE("two-arm events") {
  auto g = generate("torus:8x8");
  const EdgeId e = *g.edge_id(0, 8);  // vertical edge between rows 0 and 1
  CHECK_FALSE(two_arm_event(g, Config::all(g, true), e, 2));
  CHECK_FALSE(two_arm_event(g, Config::all(g, false), e, 2));
  std::vector<Edge> lines;
  for (VertexId x = 0; x < 8; ++x) {
    lines.push_back({x, (x + 1) % 8});
    lines.push_back({8 + x, 8 + (x + 1) % 8});
  }
  auto c = Config::from_pairs(g, lines);
  CHECK(two_arm_event(g, c, e, 8));
  CHECK_FALSE(two_arm_event(g, c, e, 9));
  CHECK(two_arm_event(g, clusters(g, c), e, 8));
}

TEST_CASE("pivotality") {
  auto g = generate("torus:16x16");
  CHECK_FALSE(piv_event(g, Config::all(g, true), 0, 1, 5));
  CHECK_FALSE(piv_event(g, Config::all(g, false), 0, 1, 5));
  // two rays from the root's neighbours going right and left along row 0 / row 1
  std::vector<Edge> rays;
  for (VertexId x = 1; x < 6; ++x) rays.push_back({x, x + 1});
  for (VertexId x = 15; x > 10; --x) rays.push_back({x - 1, x});
  auto c = Config::from_pairs(g, rays);
  CHECK(piv_event(g, c, 0, 1, 5));
  CHECK_THROWS_AS(piv_event(g, c, 0, 1, 40), InfeasibleError);
}

TEST_CASE("tubes") {
  auto g = generate("cycle:20");
  std::vector<VertexId> path{0, 1, 2, 3};
  std::vector<VertexId> single{4};
  CHECK(tube_connected(g, Config::all(g, false), single, 0));
  CHECK(tube_connected(g, Config::all(g, true), path, 0));
  CHECK_FALSE(tube_connected(g, Config::all(g, false), path, 2));
  std::vector<VertexId> broken{0, 2};
  CHECK_THROWS(check_walk(g, broken));
  auto mask = tube_mask(g, path, 1);
  CHECK(std::count(mask.begin(), mask.end(), 1) == 6);
}

TEST_CASE("parallel map is independent of workers") {
  auto g = generate("torus:16x16");
  auto run = [&](unsigned w) {
    return map_trials<std::size_t>(64, w, [&](std::size_t t) {
      return clusters(g, config_at(sample_weights(g, 5, t), 0.5)).k1;
    });
  };
  auto one = run(1);
  CHECK(run(4) == one);
  CHECK(run(7) == one);
}
