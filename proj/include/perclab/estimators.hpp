#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perclab/graph.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

/// Default base seed for every Monte Carlo quantity ("circle ... seed").
inline constexpr std::uint64_t kDefaultSeed = 0xC1C1E5CA1E0F5EEDull;

/// Trial budget shared by all estimators. Trial i of an estimator always uses
/// the random fields keyed by (seed, i), so results do not depend on
/// `workers`, and estimators called with the same seed share samples.
struct McParams {
  std::uint64_t trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  double confidence = 0.95;
};

struct MCEstimate {
  double sum = 0.0;  // successes for probabilities
  std::uint64_t trials = 0;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence = 0.95;
  /// Plug-in standard error: sqrt(point (1 - point) / trials) for
  /// probabilities, sample sd / sqrt(trials) for means.
  double std_error = 0.0;
};

/// Two-sided standard normal quantile for the given confidence level.
double normal_z(double confidence);

/// Wilson score interval around successes / trials.
MCEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

/// Sample mean with a normal-approximation interval.
MCEstimate mean_estimate(std::span<const double> samples, double confidence = 0.95);

/// Frequency of event(trial) over trials 0..T-1.
MCEstimate mc_probability(const std::function<bool(std::uint64_t trial)>& event, const McParams& params);

/// Smallest integer k with k / |V| >= alpha (with a 1e-9 relative slack so
/// that e.g. alpha = 0.5 on |V| = 4 gives 2).
std::size_t size_threshold(double alpha, std::size_t vertex_count);

/// Root vertex used by all rooted quantities.
inline constexpr VertexId kRoot = 0;

MCEstimate two_point(const FiniteGraph& g, double p, VertexId u, VertexId v, const McParams& params);

struct VertexEstimate {
  MCEstimate estimate;
  VertexId vertex = 0;
  bool clamped = false;  // radius exceeded the diameter, ball is all of V
};

/// min over u in B_r(root) of P_p(root <-> u), all u evaluated on the same
/// samples. Ties go to the smallest vertex id.
VertexEstimate min_two_point_over_ball(const FiniteGraph& g, double p, double r, const McParams& params);

/// P_p(|K_root| >= n)
MCEstimate tail_Ko(const FiniteGraph& g, double p, std::size_t n, const McParams& params);

/// P_p(|K_1| / |V| >= alpha)
MCEstimate giant_prob(const FiniteGraph& g, double p, double alpha, const McParams& params);

/// mu_{p,h}: probability that the root's open cluster meets a ghost field of
/// intensity 1 - e^{-h} (edge weights and ghosts use independent streams).
MCEstimate mu_ph(const FiniteGraph& g, double p, double h, const McParams& params);

struct CorridorEstimate {
  MCEstimate estimate;          // minimum over the sampled paths
  std::vector<VertexId> path;   // minimising geodesic
  int length = 0;
  bool clamped = false;         // requested length exceeded the diameter
  std::size_t paths_evaluated = 0;
};

/// Canonical geodesic from `from` to `to` (each step goes to the smallest-id
/// neighbour one step closer to `to`).
std::vector<VertexId> geodesic(const FiniteGraph& g, VertexId from, VertexId to);

/// Upper estimate of the corridor function kappa_p(m, n): over up to
/// `paths_budget` geodesics of length min(m, diameter) from the root, the
/// minimum probability that the endpoints connect inside the n-tube.
CorridorEstimate corridor_kappa(const FiniteGraph& g, double p, double m, double n,
                                std::size_t paths_budget, const McParams& params);

struct CostReport {
  double n = 0.0;
  int outer_radius = 0;  // floor(n^{1/3})
  int max_b = 0;         // floor(n^{1/3} / 8)
  double threshold = 0.0;  // 1 / log n
  /// Largest b whose Piv[4b, n^{1/3}] estimate has its CI upper bound below
  /// the threshold; 0 when no b in 1..max_b could be certified.
  int U = 0;
  bool certified = false;
  double cost = 0.0;  // +inf when U == 0
  MCEstimate piv_prob_at_U;
  std::vector<MCEstimate> piv_by_b;  // index b - 1
};

CostReport uniqueness_zone_and_cost(const FiniteGraph& g, double p, double n, const McParams& params);

/// Scale functions of the multi-scale colouring.
namespace scale {
double phi(double t);          // 1 - 2^{-e^t}
double phi_inv(double p);      // p in (0, 1)
double delta_scale(double n);  // e^{-sqrt(log log n)}, n >= e
double R(double n);            // e^{(log n)^9}, may overflow to +inf
double log_R(double n);        // (log n)^9
double L(double n);            // sqrt(log n)
double delta_at_R(double n);   // delta_scale(R(n)) evaluated in log space
}  // namespace scale

struct OrangeStatus {
  bool orange = false;
  double margin = 0.0;     // estimate - delta(n)
  double threshold = 0.0;  // delta(n)
  double p = 0.0;
  VertexEstimate min_two_point;
  bool clamped = false;
};

OrangeStatus orange_status(const FiniteGraph& g, double n, double t, const McParams& params);

struct GreenParams {
  double low_growth_exponent = 100.0;
  std::size_t paths_budget = 8;
};

struct GreenStatus {
  enum class Reason { kNotOrange, kNotLowGrowth, kCorridor, kCorridorTooWeak };
  bool green = false;
  Reason reason = Reason::kNotOrange;
  OrangeStatus orange;
  bool low_growth = false;
  std::optional<CorridorEstimate> corridor;
  double corridor_threshold = 0.0;  // delta(R(n))
  double margin = 0.0;
  bool clamped = false;  // corridor length R^2(n) was clamped to the diameter
};

GreenStatus green_status(const FiniteGraph& g, double n, double t, const GreenParams& green,
                         const McParams& params);

std::string to_string(GreenStatus::Reason r);

}  // namespace perclab
