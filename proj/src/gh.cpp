#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "perclab/geometry.hpp"
#include "perclab/metric.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

// Root eccentricity is the diameter on vertex-transitive graphs (every
// generator output); anything else gets the all-pairs computation when it is
// affordable.
int graph_diameter(const FiniteGraph& g) {
  const double work = static_cast<double>(g.vertex_count()) * static_cast<double>(g.vertex_count() + g.edge_count());
  if (g.regular_degree() && work > 2e8) return metric_profile(g, 0).diameter;
  return all_pairs_diameter(g);
}

int cycle_density(const FiniteGraph& g, const std::vector<VertexId>& cycle) {
  const auto d = bfs_distances(g, cycle);
  int worst = 0;
  for (auto x : d) worst = std::max(worst, x);
  return worst;
}

int cycle_defect(const FiniteGraph& g, const std::vector<VertexId>& cycle) {
  const int l = static_cast<int>(cycle.size());
  int worst = 0;
  for (int s = 0; s < l; ++s) {
    const auto d = bfs_distances(g, cycle[s]);
    for (int t = s + 1; t < l; ++t) {
      const int along = std::min(t - s, l - (t - s));
      worst = std::max(worst, along - d[cycle[t]]);
    }
  }
  return worst;
}

double upper_value(int l, int a, int b, int D, double* term_scale, double* term_length) {
  const double ts = 2.0 * std::numbers::pi / l * (a + b + 1);
  const double tl = std::numbers::pi * D * std::abs(1.0 / D - 2.0 / l);
  if (term_scale) *term_scale = ts;
  if (term_length) *term_length = tl;
  return ts + tl;
}

bool is_simple_cycle(const FiniteGraph& g, const std::vector<VertexId>& cycle) {
  if (cycle.size() < 3) return false;
  std::vector<VertexId> sorted = cycle;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto a = cycle[i], b = cycle[(i + 1) % cycle.size()];
    if (a >= g.vertex_count() || b >= g.vertex_count() || !g.edge_id(a, b)) return false;
  }
  return true;
}

// Greedy packing of points at pairwise distance >= sep, scanning `order`.
std::vector<VertexId> greedy_packing(const FiniteGraph& g, const std::vector<VertexId>& order, int sep) {
  std::vector<char> blocked(g.vertex_count(), 0);
  std::vector<VertexId> picked;
  for (auto v : order) {
    if (blocked[v]) continue;
    picked.push_back(v);
    const VertexId src[] = {v};
    const auto d = bfs_distances(g, src, sep - 1);
    for (VertexId w = 0; w < g.vertex_count(); ++w)
      if (d[w] != kUnreached) blocked[w] = 1;
  }
  return picked;
}

}  // namespace

std::optional<CycleWitness> dense_cycle_certificate(const FiniteGraph& g, std::size_t budget_roots) {
  const auto nv = g.vertex_count();
  if (nv < 3 || budget_roots == 0) return std::nullopt;
  const int D = graph_diameter(g);
  constexpr std::size_t kDensityChecks = 256;
  constexpr std::size_t kDefectChecks = 16;

  std::vector<std::vector<VertexId>> dense;
  const std::size_t roots = std::min<std::size_t>(budget_roots, nv);
  for (std::size_t i = 0; i < roots; ++i) {
    const auto root = static_cast<VertexId>(i * nv / roots);
    const auto dist = bfs_distances(g, root);
    auto parent = [&](VertexId x) {
      for (auto w : g.neighbors(x))
        if (dist[w] == dist[x] - 1) return w;
      return x;
    };
    std::vector<std::vector<VertexId>> cycles;
    for (const auto& e : g.edges()) {
      if (dist[e.u] == kUnreached) continue;
      if (parent(e.u) == e.v || parent(e.v) == e.u) continue;
      std::vector<VertexId> left{e.u}, right{e.v};
      while (left.back() != right.back()) {
        if (dist[left.back()] >= dist[right.back()]) left.push_back(parent(left.back()));
        else right.push_back(parent(right.back()));
      }
      right.pop_back();  // the common ancestor already ends `left`
      // e.u -> ... -> ancestor -> ... -> e.v, closed by the edge e
      std::vector<VertexId> full(left.begin(), left.end());
      full.insert(full.end(), right.rbegin(), right.rend());
      cycles.push_back(std::move(full));
    }
    std::stable_sort(cycles.begin(), cycles.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    if (cycles.size() > kDensityChecks) cycles.resize(kDensityChecks);
    for (auto& c : cycles)
      if (8 * cycle_density(g, c) <= D) dense.push_back(std::move(c));
  }
  if (dense.empty()) return std::nullopt;

  std::vector<CycleWitness> witnesses;
  for (auto& c : dense) witnesses.push_back({std::move(c), 0, 0});
  for (auto& w : witnesses) w.density = cycle_density(g, w.cycle);
  std::stable_sort(witnesses.begin(), witnesses.end(), [](const auto& a, const auto& b) {
    return a.density != b.density ? a.density < b.density : a.cycle.size() > b.cycle.size();
  });
  if (witnesses.size() > kDefectChecks) witnesses.resize(kDefectChecks);
  std::optional<CycleWitness> best;
  double best_value = 0.0;
  for (auto& w : witnesses) {
    w.defect = cycle_defect(g, w.cycle);
    const double v = upper_value(static_cast<int>(w.cycle.size()), w.density, w.defect, D, nullptr, nullptr);
    if (!best || v < best_value) {
      best = w;
      best_value = v;
    }
  }
  return best;
}

GHCertificate gh_circle_upper(const FiniteGraph& g, std::size_t budget_roots) {
  GHCertificate c;
  c.kind = GHCertificate::Kind::kUpper;
  c.diameter = graph_diameter(g);
  c.value = kTrivialGH;
  c.trivial = true;
  if (c.diameter < 1) return c;
  auto w = dense_cycle_certificate(g, budget_roots);
  if (!w) return c;
  const double v = upper_value(static_cast<int>(w->cycle.size()), w->density, w->defect, c.diameter, &c.term_scale,
                               &c.term_length);
  c.cycle = std::move(w);
  if (v < kTrivialGH) {
    c.value = v;
    c.trivial = false;
  }
  return c;
}

GHCertificate gh_circle_lower(const FiniteGraph& g) {
  GHCertificate c;
  c.kind = GHCertificate::Kind::kLower;
  c.diameter = graph_diameter(g);
  c.value = 0.0;
  c.trivial = true;
  const auto nv = g.vertex_count();
  if (c.diameter < 1) return c;

  std::vector<std::vector<VertexId>> orders;
  std::vector<VertexId> canonical(nv);
  std::iota(canonical.begin(), canonical.end(), VertexId{0});
  orders.push_back(canonical);
  orders.emplace_back(canonical.rbegin(), canonical.rend());
  {
    const auto d = bfs_distances(g, 0);
    auto by_dist = canonical;
    std::stable_sort(by_dist.begin(), by_dist.end(), [&](VertexId a, VertexId b) { return d[a] < d[b]; });
    orders.push_back(std::move(by_dist));
  }
  for (std::uint64_t s = 0; s < 2; ++s) {
    auto shuffled = canonical;
    SplitMix64 rng(derive_seed(0x9AC4u, s));
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    orders.push_back(std::move(shuffled));
  }

  // Separations: every integer up to 256 values, evenly spread beyond that.
  std::vector<int> seps;
  const int D = c.diameter;
  const int steps = std::min(D, 256);
  for (int i = 1; i <= steps; ++i) seps.push_back(static_cast<int>(static_cast<long long>(i) * D / steps));
  seps.erase(std::unique(seps.begin(), seps.end()), seps.end());

  for (int sep : seps) {
    const double eps = std::numbers::pi * sep / D;
    std::vector<VertexId> best;
    for (const auto& order : orders) {
      auto p = greedy_packing(g, order, sep);
      if (p.size() > best.size()) best = std::move(p);
    }
    const double value = (eps - 2.0 * std::numbers::pi / static_cast<double>(best.size())) / 2.0;
    if (value > c.value) {
      c.value = value;
      c.trivial = false;
      c.packing = std::move(best);
      c.separation = sep;
      c.epsilon = eps;
    }
  }
  return c;
}

bool verify_upper(const FiniteGraph& g, const GHCertificate& c) {
  if (c.kind != GHCertificate::Kind::kUpper) return false;
  const int D = graph_diameter(g);
  if (D != c.diameter) return false;
  if (c.trivial) return c.value >= kTrivialGH - 1e-15;
  if (!c.cycle || !is_simple_cycle(g, c.cycle->cycle)) return false;
  const int a = cycle_density(g, c.cycle->cycle);
  const int b = cycle_defect(g, c.cycle->cycle);
  if (a != c.cycle->density || b != c.cycle->defect) return false;
  const double v = upper_value(static_cast<int>(c.cycle->cycle.size()), a, b, D, nullptr, nullptr);
  return c.value >= v - 1e-12;
}

bool verify_lower(const FiniteGraph& g, const GHCertificate& c) {
  if (c.kind != GHCertificate::Kind::kLower) return false;
  const int D = graph_diameter(g);
  if (D != c.diameter) return false;
  if (c.trivial) return c.value <= 0.0;
  for (std::size_t i = 0; i < c.packing.size(); ++i) {
    const auto d = bfs_distances(g, c.packing[i]);
    for (std::size_t j = i + 1; j < c.packing.size(); ++j)
      if (d[c.packing[j]] < c.separation) return false;
  }
  const double eps = std::numbers::pi * c.separation / D;
  const double bound = (eps - 2.0 * std::numbers::pi / static_cast<double>(c.packing.size())) / 2.0;
  return c.value <= bound + 1e-12;
}

GammaQuantities gamma_quantities(const FiniteGraph& g, const GHCertificate& upper, const GHCertificate& lower) {
  GammaQuantities q;
  q.diameter = upper.diameter;
  const double D = upper.diameter;
  q.gamma_low = lower.value * D;
  q.gamma_high = upper.value * D;
  auto log_plus = [](double gamma) {
    if (gamma <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::pow(std::log(gamma), 9);
  };
  q.log_gamma_plus_low = log_plus(q.gamma_low);
  q.log_gamma_plus_high = log_plus(q.gamma_high);
  q.exceeds_graph = q.log_gamma_plus_low > std::log(static_cast<double>(g.vertex_count()));
  q.circle_like_fast = D >= 1 && q.log_gamma_plus_high <= std::log(D);
  return q;
}

GammaQuantities gamma_quantities(const FiniteGraph& g) {
  return gamma_quantities(g, gh_circle_upper(g), gh_circle_lower(g));
}

}  // namespace perclab
