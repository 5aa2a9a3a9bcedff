#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "perclab/graph.hpp"
#include "perclab/metric.hpp"

using namespace perclab;

namespace {

// Plain O(V^3) Floyd-Warshall, independent of the BFS code.
std::vector<std::vector<int>> floyd(const FiniteGraph& g) {
  const int n = static_cast<int>(g.vertex_count());
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

TEST_CASE("generator counts and degrees") {
  auto c6 = generate("cycle:6");
  CHECK(c6.vertex_count() == 6);
  CHECK(c6.edge_count() == 6);
  CHECK(c6.regular_degree() == 2u);
  CHECK(metric_profile(c6, 0).diameter == 3);

  auto t44 = generate("torus:4x4");
  CHECK(t44.vertex_count() == 16);
  CHECK(t44.edge_count() == 32);
  CHECK(t44.regular_degree() == 4u);
  CHECK(metric_profile(t44, 0).diameter == 4);

  auto circ = generate("circulant:30:2,3");
  CHECK(circ.vertex_count() == 30);
  CHECK(circ.regular_degree() == 4u);
  CHECK(circ.is_connected());

  CHECK(generate("torus:8x8").edge_count() == 128);
  CHECK(generate("torus:3x4x5").regular_degree() == 6u);
}

TEST_CASE("spec errors") {
  CHECK_THROWS_AS(generate("cycle:2"), SpecError);
  CHECK_THROWS_AS(generate("torus:2x8"), SpecError);
  CHECK_THROWS_AS(generate("ring:5"), SpecError);
  CHECK_THROWS_AS(generate("cycle:"), SpecError);
  CHECK_THROWS_AS(generate("cycle:12x"), SpecError);
  CHECK_THROWS_AS(generate("circulant:12:2,4"), SpecError);  // gcd 2: disconnected
  try {
    generate("cycle:2");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("n below minimum") != std::string::npos);
  }
}

TEST_CASE("generate is deterministic and edges are canonical") {
  for (const char* spec : {"cycle:17", "torus:5x7", "circulant:40:1,7,9"}) {
    auto a = generate(spec), b = generate(spec);
    REQUIRE(a.edge_count() == b.edge_count());
    CHECK(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin()));
    std::set<std::pair<VertexId, VertexId>> seen;
    for (const auto& e : a.edges()) {
      CHECK(e.u < e.v);
      CHECK(seen.insert({e.u, e.v}).second);
    }
    CHECK(a.is_connected());
    for (VertexId v = 0; v < a.vertex_count(); ++v)
      for (auto w : a.neighbors(v)) CHECK(a.edge_id(w, v).has_value());
  }
}

TEST_CASE("edge list export") {
  std::ostringstream os;
  generate("cycle:4").write_edge_list(os);
  CHECK(os.str() == "0 1\n0 3\n1 2\n2 3\n");
}

TEST_CASE("cayley tables") {
  // Z_6 with generators {1, 5}
  std::string z6 = "6 2\n";
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) z6 += std::to_string((a + b) % 6) + (b == 5 ? "\n" : " ");
  }
  z6 += "1 5\n";
  auto g = cayley_from_text(z6, "cayley:z6");
  CHECK(g.vertex_count() == 6);
  CHECK(g.edge_count() == 6);
  CHECK(metric_profile(g, 0).diameter == 3);

  std::string not_symmetric = z6.substr(0, z6.rfind("1 5")) + "1 2\n";
  CHECK_THROWS(cayley_from_text(not_symmetric, "bad"));
  std::string not_generating = z6.substr(0, z6.rfind("1 5")) + "2 4\n";
  CHECK_THROWS(cayley_from_text(not_generating, "bad"));
  std::string broken = z6;
  broken[4] = '1';  // row 0 no longer a permutation
  CHECK_THROWS(cayley_from_text(broken, "bad"));
}

TEST_CASE("metric profile against Floyd-Warshall") {
  for (const char* spec : {"cycle:6", "cycle:13", "torus:4x4", "torus:5x6", "circulant:30:2,3", "torus:3x3x4"}) {
    auto g = generate(spec);
    auto d = floyd(g);
    auto m = metric_profile(g, 0);
    int ecc = 0, diam = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      CHECK(m.distances[v] == d[0][v]);
      ecc = std::max(ecc, d[0][v]);
      for (VertexId w = 0; w < g.vertex_count(); ++w) {
        CHECK(d[v][w] == d[w][v]);
        diam = std::max(diam, d[v][w]);
      }
    }
    CHECK(m.diameter == ecc);
    CHECK(all_pairs_diameter(g) == diam);
    CHECK(m.growth.back() == g.vertex_count());
    for (int n = 1; n <= m.diameter; ++n) {
      CHECK(m.growth[n] >= m.growth[n - 1]);
      CHECK(m.growth[n] - m.growth[n - 1] == sphere(m, n).size());
    }
    for (const auto& e : g.edges()) CHECK(std::abs(m.distances[e.u] - m.distances[e.v]) <= 1);
  }
  auto c6 = metric_profile(generate("cycle:6"), 0);
  CHECK(c6.distances == std::vector<int>{0, 1, 2, 3, 2, 1});
  auto t8 = metric_profile(generate("torus:8x8"), 0);
  CHECK(t8.ball_size(1) == 5);
  CHECK(t8.ball_size(2) == 13);
  CHECK(t8.ball_size(2.9) == 13);
  CHECK(metric_profile(generate("torus:4x64"), 0).diameter == 34);
  CHECK(metric_profile(generate("torus:7x9x4"), 0, {true}).diameter == 3 + 4 + 2);
}

TEST_CASE("balls and spheres") {
  auto g = generate("cycle:12");
  CHECK(sphere(g, 0, 2) == std::vector<VertexId>{2, 10});
  CHECK(sphere(g, 0, 2.7) == std::vector<VertexId>{2, 10});
  CHECK(sphere(g, 0, 7).empty());
  CHECK(ball(g, 0, 0) == std::vector<VertexId>{0});
  CHECK(sphere(g, 0, 0) == std::vector<VertexId>{0});
  CHECK(ball(g, 0, 100).size() == 12);
}

TEST_CASE("nets") {
  auto check_net = [](const FiniteGraph& g, double r) {
    auto net = build_net(g, r);
    const int R = static_cast<int>(r);
    REQUIRE(!net.centers.empty());
    CHECK(net.centers[0] == 0);
    CHECK(net.parent[0] == 0);
    auto d = floyd(g);
    for (std::size_t i = 0; i < net.centers.size(); ++i)
      for (std::size_t j = i + 1; j < net.centers.size(); ++j) CHECK(d[net.centers[i]][net.centers[j]] >= 2 * R);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      int best = 1 << 28;
      for (auto c : net.centers) best = std::min(best, d[v][c]);
      CHECK(best <= 2 * R);
    }
    // tree: following parents reaches the root, edges join centres within 5r
    for (std::size_t i = 0; i < net.centers.size(); ++i) {
      std::size_t x = i, steps = 0;
      while (x != 0 && steps++ <= net.centers.size()) {
        CHECK(d[net.centers[x]][net.centers[net.parent[x]]] <= 5 * R);
        x = net.parent[x];
      }
      CHECK(x == 0);
    }
    return net;
  };
  CHECK(check_net(generate("cycle:12"), 2).centers.size() == 3);
  check_net(generate("torus:8x8"), 1);
  check_net(generate("circulant:30:2,3"), 1);
  CHECK(check_net(generate("cycle:12"), 4).centers.size() == 1);  // 2r > diameter
}

TEST_CASE("local homogeneity") {
  CHECK(check_local_homogeneity(generate("cycle:20"), 3, 10).homogeneous);
  CHECK(check_local_homogeneity(generate("torus:6x6"), 2, 10).homogeneous);
  auto path = FiniteGraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, "path:5");
  CHECK_FALSE(check_local_homogeneity(path, 1, 10).homogeneous);
  CHECK(rooted_balls_isomorphic(path, 0, 2, 1) == false);
  CHECK(rooted_balls_isomorphic(path, 1, 3, 1) == true);
}

TEST_CASE("low growth scales") {
  CHECK(is_low_growth(generate("torus:64x64"), 10, 100));
  CHECK_FALSE(is_low_growth(generate("cycle:20"), 3, 2));
  CHECK(is_low_growth(generate("cycle:100"), 50, 100));
}
