#include "perclab/kernels.hpp"

namespace perclab::kernels::detail {

void fill_uniform_scalar(const StreamKey& key, std::uint32_t first, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = uniform_at(key, first + static_cast<std::uint32_t>(i));
  }
}

std::size_t threshold_le_scalar(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool hit = values[i] <= threshold;
    mask[i] = hit;
    count += hit;
  }
  return count;
}

std::size_t threshold_lt_scalar(std::span<const double> values, double threshold,
                                std::span<std::uint8_t> mask) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool hit = values[i] < threshold;
    mask[i] = hit;
    count += hit;
  }
  return count;
}

std::size_t count_le_scalar(std::span<const double> values, double threshold) {
  std::size_t count = 0;
  for (double v : values) count += v <= threshold;
  return count;
}

}  // namespace perclab::kernels::detail
