#include "perclab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "perclab/metric.hpp"
#include "perclab/parallel.hpp"

namespace perclab {

namespace {

void check_params(const McParams& params) {
  if (params.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(params.confidence > 0.0 && params.confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0, 1)");
}

void check_vertex(const FiniteGraph& g, VertexId v) {
  if (v >= g.vertex_count()) throw std::out_of_range("vertex out of range");
}

MCEstimate count_estimate(const std::vector<std::uint8_t>& hits, double confidence) {
  std::uint64_t successes = 0;
  for (auto h : hits) successes += h;
  return wilson_estimate(successes, hits.size(), confidence);
}

// Runs event(config, trial) on config_at(sample(seed, trial), p) for every trial.
template <class Fn>
std::vector<std::uint8_t> per_trial(const FiniteGraph& g, double p, const McParams& params, Fn&& fn) {
  check_params(params);
  return map_trials<std::uint8_t>(params.trials, params.workers, [&](std::size_t t) -> std::uint8_t {
    const auto sample = sample_weights(g, params.seed, t);
    const auto config = config_at(sample, p);
    return fn(config, static_cast<std::uint64_t>(t)) ? 1 : 0;
  });
}

}  // namespace

double normal_z(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

MCEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double z = normal_z(confidence);
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
  MCEstimate est;
  est.sum = static_cast<double>(successes);
  est.trials = trials;
  est.point = ph;
  est.confidence = confidence;
  est.ci_low = std::clamp(std::min(center - half, ph), 0.0, 1.0);
  est.ci_high = std::clamp(std::max(center + half, ph), 0.0, 1.0);
  if (successes == 0) est.ci_low = 0.0;
  if (successes == trials) est.ci_high = 1.0;
  est.std_error = std::sqrt(ph * (1.0 - ph) / n);
  return est;
}

MCEstimate mean_estimate(std::span<const double> samples, double confidence) {
  if (samples.empty()) throw std::invalid_argument("mean of an empty sample");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  MCEstimate est;
  est.sum = sum;
  est.trials = samples.size();
  est.point = mean;
  est.confidence = confidence;
  est.std_error = sd / std::sqrt(n);
  const double z = normal_z(confidence);
  est.ci_low = mean - z * est.std_error;
  est.ci_high = mean + z * est.std_error;
  return est;
}

MCEstimate mc_probability(const std::function<bool(std::uint64_t)>& event, const McParams& params) {
  check_params(params);
  const auto hits = map_trials<std::uint8_t>(params.trials, params.workers,
                                             [&](std::size_t t) -> std::uint8_t { return event(t) ? 1 : 0; });
  return count_estimate(hits, params.confidence);
}

std::size_t size_threshold(double alpha, std::size_t vertex_count) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  const double raw = alpha * static_cast<double>(vertex_count);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, 1, vertex_count);
}

MCEstimate two_point(const FiniteGraph& g, double p, VertexId u, VertexId v, const McParams& params) {
  check_vertex(g, u);
  check_vertex(g, v);
  const auto hits = per_trial(g, p, params, [&](const Config& c, std::uint64_t) { return connected(g, c, u, v); });
  return count_estimate(hits, params.confidence);
}

VertexEstimate min_two_point_over_ball(const FiniteGraph& g, double p, double r, const McParams& params) {
  check_params(params);
  const auto profile = metric_profile(g, kRoot);
  VertexEstimate out;
  out.clamped = floor_radius(r) > profile.diameter;
  const auto members = ball(profile, r);
  if (members.empty()) throw std::invalid_argument("ball radius must be >= 0");

  const auto rows = map_trials<std::vector<std::uint8_t>>(params.trials, params.workers, [&](std::size_t t) {
    const auto sample = sample_weights(g, params.seed, t);
    const auto report = clusters(g, config_at(sample, p));
    std::vector<std::uint8_t> row(members.size());
    const auto root_label = report.label[kRoot];
    for (std::size_t i = 0; i < members.size(); ++i) row[i] = report.label[members[i]] == root_label;
    return row;
  });
  std::vector<std::uint64_t> counts(members.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) counts[i] += row[i];

  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (counts[i] < counts[best] || (counts[i] == counts[best] && members[i] < members[best])) best = i;
  }
  out.vertex = members[best];
  out.estimate = wilson_estimate(counts[best], params.trials, params.confidence);
  return out;
}

MCEstimate tail_Ko(const FiniteGraph& g, double p, std::size_t n, const McParams& params) {
  if (n < 1) throw std::invalid_argument("tail size must be >= 1");
  const auto hits = per_trial(g, p, params, [&](const Config& c, std::uint64_t) {
    // Bounded BFS from the root: stop as soon as n vertices are found.
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<VertexId> stack{kRoot};
    seen[kRoot] = 1;
    std::size_t found = 1;
    while (!stack.empty() && found < n) {
      const auto x = stack.back();
      stack.pop_back();
      const auto nb = g.neighbors(x);
      const auto ids = g.incident_edges(x);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (!c.open[ids[i]] || seen[nb[i]]) continue;
        seen[nb[i]] = 1;
        ++found;
        stack.push_back(nb[i]);
      }
    }
    return found >= n;
  });
  return count_estimate(hits, params.confidence);
}

MCEstimate giant_prob(const FiniteGraph& g, double p, double alpha, const McParams& params) {
  const auto k = size_threshold(alpha, g.vertex_count());
  const auto hits = per_trial(g, p, params, [&](const Config& c, std::uint64_t) {
    UnionFind uf(g.vertex_count());
    const auto edges = g.edges();
    for (EdgeId e = 0; e < edges.size(); ++e)
      if (c.open[e]) uf.unite(edges[e].u, edges[e].v);
    return uf.largest() >= k;
  });
  return count_estimate(hits, params.confidence);
}

MCEstimate mu_ph(const FiniteGraph& g, double p, double h, const McParams& params) {
  if (!(h >= 0.0)) throw std::invalid_argument("h must be >= 0");
  const double q = -std::expm1(-h);
  const auto hits = per_trial(g, p, params, [&](const Config& c, std::uint64_t t) {
    const auto ghost = sample_ghost(g, q, params.seed, t);
    return ghost_connected(g, c, ghost, kRoot);
  });
  return count_estimate(hits, params.confidence);
}

std::vector<VertexId> geodesic(const FiniteGraph& g, VertexId from, VertexId to) {
  check_vertex(g, from);
  check_vertex(g, to);
  const auto dist = bfs_distances(g, to);
  if (dist[from] == kUnreached) throw InfeasibleError("no path between the requested vertices");
  std::vector<VertexId> path{from};
  VertexId x = from;
  while (x != to) {
    VertexId next = x;
    for (auto w : g.neighbors(x)) {
      if (dist[w] == dist[x] - 1) {
        next = w;
        break;  // neighbours are sorted, so this is the smallest id
      }
    }
    x = next;
    path.push_back(x);
  }
  return path;
}

CorridorEstimate corridor_kappa(const FiniteGraph& g, double p, double m, double n, std::size_t paths_budget,
                                const McParams& params) {
  check_params(params);
  if (!(m >= 1.0)) throw std::invalid_argument("corridor length m must be >= 1");
  if (paths_budget < 1) throw std::invalid_argument("paths_budget must be >= 1");
  const auto profile = metric_profile(g, kRoot);
  const int requested = floor_radius(m);
  const int length = std::min(requested, profile.diameter);
  if (length < 1) throw InfeasibleError("no path of the requested length");
  const auto layer = sphere(profile, length);
  if (layer.empty()) throw InfeasibleError("no path of the requested length");

  // Evenly spaced endpoints over the sorted layer.
  std::vector<VertexId> ends;
  const std::size_t count = std::min(paths_budget, layer.size());
  for (std::size_t i = 0; i < count; ++i) ends.push_back(layer[i * layer.size() / count]);

  std::vector<std::vector<VertexId>> paths;
  std::vector<std::vector<char>> tubes;
  for (auto end : ends) {
    paths.push_back(geodesic(g, kRoot, end));
    tubes.push_back(tube_mask(g, paths.back(), n));
  }

  const auto rows = map_trials<std::vector<std::uint8_t>>(params.trials, params.workers, [&](std::size_t t) {
    const auto sample = sample_weights(g, params.seed, t);
    const auto config = config_at(sample, p);
    std::vector<std::uint8_t> row(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
      row[i] = tube_connected(g, config, tubes[i], paths[i].front(), paths[i].back());
    return row;
  });
  std::vector<std::uint64_t> counts(paths.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) counts[i] += row[i];
  const auto best = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());

  CorridorEstimate out;
  out.estimate = wilson_estimate(counts[best], params.trials, params.confidence);
  out.path = paths[best];
  out.length = length;
  out.clamped = requested > profile.diameter;
  out.paths_evaluated = paths.size();
  return out;
}

CostReport uniqueness_zone_and_cost(const FiniteGraph& g, double p, double n, const McParams& params) {
  check_params(params);
  if (!(n >= 27.0)) throw std::invalid_argument("uniqueness zone needs n >= 27");
  CostReport out;
  out.n = n;
  const double third = std::cbrt(n);
  out.outer_radius = floor_radius(third);
  out.max_b = floor_radius(third / 8.0);
  out.threshold = 1.0 / std::log(n);
  const auto profile = metric_profile(g, kRoot);
  if (out.outer_radius > profile.diameter) throw InfeasibleError("scale infeasible: n^{1/3} exceeds the diameter");
  if (out.max_b < 1) throw InfeasibleError("scale infeasible: n^{1/3} / 8 < 1 leaves no admissible b");

  const int outer = out.outer_radius;
  const auto& dist = profile.distances;
  std::vector<EdgeId> inner_edges;
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e)
    if (dist[edges[e].u] <= outer && dist[edges[e].v] <= outer) inner_edges.push_back(e);

  // Piv[m, outer] holds iff at least two clusters of the ball-restricted
  // configuration reach S_outer and come within distance m of the root, i.e.
  // iff the second smallest root distance among crossing clusters is <= m.
  const auto second = map_trials<int>(params.trials, params.workers, [&](std::size_t t) {
    const auto sample = sample_weights(g, params.seed, t);
    UnionFind uf(g.vertex_count());
    for (auto e : inner_edges)
      if (sample.weights[e] <= p && p > 0.0) uf.unite(edges[e].u, edges[e].v);
    std::vector<int> closest(g.vertex_count(), kUnreached);
    std::vector<char> reaches(g.vertex_count(), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (dist[v] > outer) continue;
      const auto r = uf.find(v);
      closest[r] = std::min(closest[r], dist[v]);
      if (dist[v] == outer) reaches[r] = 1;
    }
    int best = kUnreached, runner = kUnreached;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (!reaches[v]) continue;
      if (closest[v] < best) {
        runner = best;
        best = closest[v];
      } else if (closest[v] < runner) {
        runner = closest[v];
      }
    }
    return runner;
  });

  out.piv_by_b.resize(out.max_b);
  for (int b = 1; b <= out.max_b; ++b) {
    std::uint64_t hits = 0;
    for (int s : second) hits += s <= 4 * b;
    out.piv_by_b[b - 1] = wilson_estimate(hits, params.trials, params.confidence);
  }
  for (int b = out.max_b; b >= 1; --b) {
    if (out.piv_by_b[b - 1].ci_high < out.threshold) {
      out.U = b;
      out.certified = true;
      break;
    }
  }
  if (out.certified) {
    out.piv_prob_at_U = out.piv_by_b[out.U - 1];
    const double log_gr = std::log(static_cast<double>(profile.ball_size(out.U)));
    out.cost = std::pow(std::log(std::log(n)) / std::min(std::log(n), log_gr), 0.25);
  } else {
    out.cost = std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace scale {

double phi(double t) { return -std::expm1(-std::exp(t) * std::numbers::ln2); }

double phi_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("phi_inv needs p in (0, 1)");
  return std::log(-std::log1p(-p) / std::numbers::ln2);
}

double delta_scale(double n) {
  if (!(n >= std::numbers::e)) throw std::domain_error("delta_scale needs n >= e");
  return std::exp(-std::sqrt(std::max(0.0, std::log(std::log(n)))));
}

double log_R(double n) {
  if (!(n >= 1.0)) throw std::domain_error("R needs n >= 1");
  return std::pow(std::log(n), 9);
}

double R(double n) { return std::exp(log_R(n)); }

double L(double n) {
  if (!(n >= 1.0)) throw std::domain_error("L needs n >= 1");
  return std::sqrt(std::log(n));
}

double delta_at_R(double n) {
  if (!(n >= std::numbers::e)) throw std::domain_error("delta_at_R needs n >= e");
  return std::exp(-std::sqrt(std::max(0.0, std::log(log_R(n)))));
}

}  // namespace scale

OrangeStatus orange_status(const FiniteGraph& g, double n, double t, const McParams& params) {
  OrangeStatus out;
  out.threshold = scale::delta_scale(n);
  out.p = scale::phi(t);
  out.min_two_point = min_two_point_over_ball(g, out.p, n, params);
  out.clamped = out.min_two_point.clamped;
  out.margin = out.min_two_point.estimate.point - out.threshold;
  out.orange = out.margin >= 0.0;
  return out;
}

GreenStatus green_status(const FiniteGraph& g, double n, double t, const GreenParams& green,
                         const McParams& params) {
  GreenStatus out;
  out.orange = orange_status(g, n, t, params);
  out.corridor_threshold = scale::delta_at_R(n);
  const auto profile = metric_profile(g, kRoot);
  out.low_growth = is_low_growth(profile, n, green.low_growth_exponent);
  if (!out.orange.orange) {
    out.reason = GreenStatus::Reason::kNotOrange;
    out.margin = out.orange.margin;
    return out;
  }
  if (!out.low_growth) {
    out.green = true;
    out.reason = GreenStatus::Reason::kNotLowGrowth;
    out.margin = out.orange.margin;
    return out;
  }
  // R^2(n) = exp((log n)^81): compared in log space against the diameter.
  const double log_len = std::pow(std::log(n), 81);
  const double diameter = static_cast<double>(profile.diameter);
  out.clamped = log_len > std::log(std::max(diameter, 1.0));
  const double length = out.clamped ? diameter : std::exp(log_len);
  out.corridor = corridor_kappa(g, out.orange.p, std::max(1.0, length), n, green.paths_budget, params);
  const double kappa = out.corridor->estimate.point;
  out.green = kappa >= out.corridor_threshold;
  out.reason = out.green ? GreenStatus::Reason::kCorridor : GreenStatus::Reason::kCorridorTooWeak;
  out.margin = std::min(out.orange.margin, kappa - out.corridor_threshold);
  return out;
}

std::string to_string(GreenStatus::Reason r) {
  switch (r) {
    case GreenStatus::Reason::kNotOrange: return "not_orange";
    case GreenStatus::Reason::kNotLowGrowth: return "not_low_growth";
    case GreenStatus::Reason::kCorridor: return "corridor";
    case GreenStatus::Reason::kCorridorTooWeak: return "corridor_too_weak";
  }
  return "unknown";
}

}  // namespace perclab
