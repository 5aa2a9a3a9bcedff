#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace perclab {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out in contiguous blocks; the body must write only to slots owned by
/// its index. Exceptions thrown by any worker are rethrown (lowest index wins).
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Evaluates fn(i) for every trial index and returns the results in index
/// order, so any fold over the result is independent of the worker count.
template <class T, class Fn>
std::vector<T> map_trials(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<T> out(count);
  parallel_for(count, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace perclab
