#pragma once

// Per-element inner loops of the percolation engine. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 implementation; the two are
// required to produce bit-identical output. The active table is chosen once at
// first use from the CPU features, and can be forced to scalar with the
// environment variable PERC_LAB_SIMD=scalar.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "perclab/rng.hpp"

namespace perclab::kernels {

struct KernelTable {
  std::string_view name;
  /// out[i] = uniform_at(key, first + i)
  void (*fill_uniform)(const StreamKey& key, std::uint32_t first, std::span<double> out);
  /// mask[i] = values[i] <= threshold; returns the number of set entries.
  std::size_t (*threshold_le)(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask);
  /// mask[i] = values[i] < threshold; returns the number of set entries.
  std::size_t (*threshold_lt)(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask);
  /// #{i : values[i] <= threshold}
  std::size_t (*count_le)(std::span<const double> values, double threshold);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 translation unit was not built.
const KernelTable* avx2_table() noexcept;
bool cpu_has_avx2() noexcept;

/// The table used by the library.
const KernelTable& active() noexcept;

inline void fill_uniform(const StreamKey& key, std::uint32_t first, std::span<double> out) {
  active().fill_uniform(key, first, out);
}
inline std::size_t threshold_le(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask) {
  return active().threshold_le(values, threshold, mask);
}
inline std::size_t threshold_lt(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask) {
  return active().threshold_lt(values, threshold, mask);
}
inline std::size_t count_le(std::span<const double> values, double threshold) {
  return active().count_le(values, threshold);
}

namespace detail {
void fill_uniform_scalar(const StreamKey& key, std::uint32_t first, std::span<double> out);
std::size_t threshold_le_scalar(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask);
std::size_t threshold_lt_scalar(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask);
std::size_t count_le_scalar(std::span<const double> values, double threshold);

void fill_uniform_avx2(const StreamKey& key, std::uint32_t first, std::span<double> out);
std::size_t threshold_le_avx2(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask);
std::size_t threshold_lt_avx2(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask);
std::size_t count_le_avx2(std::span<const double> values, double threshold);
}  // namespace detail

}  // namespace perclab::kernels
