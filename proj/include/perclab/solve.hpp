#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "perclab/estimators.hpp"

namespace perclab {

/// The requested level cannot be hit: the event is certain or impossible
/// over the whole parameter range.
class UnreachableTargetError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

/// Empirical response went the wrong way by more than its CI allows.
class NonMonotoneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  double tol = 0.01;
  /// Upper limit for the doubling trial schedule of the quantile solver.
  std::uint64_t max_trials = 1u << 16;
};

struct ThresholdResult {
  double p = 0.0;
  std::string target;  // description of the solved equation
  double target_level = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  std::uint64_t trials_per_eval = 0;
  bool converged = false;
  MCEstimate estimate_at_p;
};

struct QuantileBracket {
  double point = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

/// Distribution-free quantile estimate from a sorted sample: the point is
/// the smallest x with F_hat(x) >= level, and [lo, hi] is the order-statistic
/// interval at the given confidence. Ranks past either end map to `floor`
/// and `ceil`.
QuantileBracket quantile_bracket(const std::vector<double>& sorted, double level, double confidence,
                                 double floor = 0.0, double ceil = 1.0);

/// Per-sample critical parameters of {K_1 >= min_k1}, trial order.
std::vector<double> critical_samples(const FiniteGraph& g, std::size_t min_k1, std::uint64_t first_trial,
                                     std::uint64_t count, const McParams& params);

/// Solves P_p(K_1 >= min_k1) = target through the per-sample critical
/// values; trials start at params.trials and double until the bracket is
/// no wider than opts.tol or opts.max_trials is reached.
ThresholdResult solve_k1_level(const FiniteGraph& g, std::size_t min_k1, double target, const SolveOptions& opts,
                               const McParams& params);

/// Generic monotone event: bisection on p with shared samples
/// (params.trials per evaluation).
using MonotoneEvent = std::function<bool(const FiniteGraph&, const Config&)>;
ThresholdResult solve_p(const FiniteGraph& g, const MonotoneEvent& event, double target, const SolveOptions& opts,
                        const McParams& params, std::string description = "event");

/// q(G): P_q(|K_1| >= |V|^{2/3}) = 1/2.
ThresholdResult solve_qG(const FiniteGraph& g, const SolveOptions& opts, const McParams& params);

/// p_c(alpha, delta): P_p(|K_1| / |V| >= alpha) = delta.
ThresholdResult solve_pc_alpha_delta(const FiniteGraph& g, double alpha, double delta, const SolveOptions& opts,
                                     const McParams& params);

/// ceil(|V|^{2/3}) with the same slack as size_threshold.
std::size_t qG_size(std::size_t vertex_count);

}  // namespace perclab
