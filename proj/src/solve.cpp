#include "perclab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>

#include "perclab/parallel.hpp"

namespace perclab {

namespace {

void check_solve_args(double target, const SolveOptions& opts) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0, 1)");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
}

MCEstimate frequency_at(const std::vector<double>& sorted, double p, double confidence) {
  std::uint64_t hits = 0;
  if (p > 0.0) hits = static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
  return wilson_estimate(hits, sorted.size(), confidence);
}

}  // namespace

QuantileBracket quantile_bracket(const std::vector<double>& sorted, double level, double confidence, double floor,
                                 double ceil) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  const std::size_t n = sorted.size();
  // order statistic x_(k), 1-based; x_(0) = floor, x_(n+1) = ceil
  auto order_stat = [&](std::size_t k) {
    if (k == 0) return floor;
    if (k > n) return ceil;
    return sorted[k - 1];
  };
  QuantileBracket out;
  const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
  out.point = order_stat(std::clamp<std::size_t>(rank, 1, n));

  // #samples <= xi ~ Binomial(n, level). P(x_(k) <= xi) = P(B >= k).
  const boost::math::binomial_distribution<double> bin(static_cast<double>(n), level);
  const double tail = (1.0 - confidence) / 2.0;
  auto cdf_below = [&](std::size_t k) {  // P(B <= k - 1)
    return k == 0 ? 0.0 : boost::math::cdf(bin, static_cast<double>(k - 1));
  };
  // largest k with P(B <= k - 1) <= tail
  std::size_t lo = 0, hi = n + 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf_below(mid) <= tail) lo = mid; else hi = mid;
  }
  const std::size_t lower_rank = lo;
  // smallest k with P(B <= k - 1) >= 1 - tail
  lo = 0;
  hi = n + 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf_below(mid) >= 1.0 - tail) hi = mid; else lo = mid;
  }
  const std::size_t upper_rank = hi;
  out.lo = std::min(order_stat(lower_rank), out.point);
  out.hi = std::max(order_stat(upper_rank), out.point);
  return out;
}

std::vector<double> critical_samples(const FiniteGraph& g, std::size_t min_k1, std::uint64_t first_trial,
                                     std::uint64_t count, const McParams& params) {
  return map_trials<double>(count, params.workers, [&](std::size_t i) {
    const auto sample = sample_weights(g, params.seed, first_trial + i);
    return critical_p(g, sample, min_k1);
  });
}

ThresholdResult solve_k1_level(const FiniteGraph& g, std::size_t min_k1, double target, const SolveOptions& opts,
                               const McParams& params) {
  check_solve_args(target, opts);
  if (params.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (min_k1 <= 1) throw UnreachableTargetError("target unreachable: event is certain at every p");
  if (min_k1 > g.vertex_count()) throw UnreachableTargetError("target unreachable: event is impossible");

  ThresholdResult out;
  out.target_level = target;
  std::ostringstream desc;
  desc << "P_p(|K_1| >= " << min_k1 << ") = " << target;
  out.target = desc.str();

  std::vector<double> crit = critical_samples(g, min_k1, 0, params.trials, params);
  for (;;) {
    std::vector<double> sorted = crit;
    std::sort(sorted.begin(), sorted.end());
    const auto q = quantile_bracket(sorted, target, params.confidence, 0.0, 1.0);
    out.p = q.point;
    out.bracket_lo = q.lo;
    out.bracket_hi = q.hi;
    out.trials_per_eval = crit.size();
    out.estimate_at_p = frequency_at(sorted, out.p, params.confidence);
    out.converged = q.hi - q.lo <= opts.tol;
    if (out.converged || crit.size() >= opts.max_trials) break;
    const auto extra = std::min<std::uint64_t>(crit.size(), opts.max_trials - crit.size());
    auto more = critical_samples(g, min_k1, crit.size(), extra, params);
    crit.insert(crit.end(), more.begin(), more.end());
  }
  return out;
}

ThresholdResult solve_p(const FiniteGraph& g, const MonotoneEvent& event, double target, const SolveOptions& opts,
                        const McParams& params, std::string description) {
  check_solve_args(target, opts);
  if (params.trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<PercolationSample> samples;
  samples.reserve(params.trials);
  for (std::uint64_t t = 0; t < params.trials; ++t) samples.push_back(sample_weights(g, params.seed, t));

  auto evaluate = [&](double p) {
    const auto hits = map_trials<std::uint8_t>(samples.size(), params.workers, [&](std::size_t t) -> std::uint8_t {
      return event(g, config_at(samples[t], p)) ? 1 : 0;
    });
    std::uint64_t s = 0;
    for (auto h : hits) s += h;
    return wilson_estimate(s, samples.size(), params.confidence);
  };

  ThresholdResult out;
  out.target_level = target;
  std::ostringstream desc;
  desc << "P_p(" << description << ") = " << target;
  out.target = desc.str();
  out.trials_per_eval = params.trials;

  auto f_lo = evaluate(0.0);
  auto f_hi = evaluate(1.0);
  if (f_lo.point >= target) throw UnreachableTargetError("target unreachable: event already at the target for p = 0");
  if (f_hi.point < target) throw UnreachableTargetError("target unreachable: event stays below the target at p = 1");
  if (f_hi.ci_high < f_lo.ci_low) throw NonMonotoneError("non-monotone empirical response");

  double lo = 0.0, hi = 1.0;
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    const auto f = evaluate(mid);
    if (f.ci_high < f_lo.ci_low || f.ci_low > f_hi.ci_high) throw NonMonotoneError("non-monotone empirical response");
    if (f.point < target) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.p = 0.5 * (lo + hi);
  out.estimate_at_p = evaluate(out.p);
  out.converged = true;
  return out;
}

std::size_t qG_size(std::size_t vertex_count) {
  const double raw = std::pow(static_cast<double>(vertex_count), 2.0 / 3.0);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

ThresholdResult solve_qG(const FiniteGraph& g, const SolveOptions& opts, const McParams& params) {
  auto r = solve_k1_level(g, qG_size(g.vertex_count()), 0.5, opts, params);
  r.target = "q(G): " + r.target;
  return r;
}

ThresholdResult solve_pc_alpha_delta(const FiniteGraph& g, double alpha, double delta, const SolveOptions& opts,
                                     const McParams& params) {
  auto r = solve_k1_level(g, size_threshold(alpha, g.vertex_count()), delta, opts, params);
  r.target = "p_c(alpha, delta): " + r.target;
  return r;
}

}  // namespace perclab
