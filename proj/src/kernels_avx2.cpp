// Compiled with -mavx2; only reached after cpu_has_avx2() returned true.
#include <immintrin.h>

#include <bit>

#include "perclab/kernels.hpp"

namespace perclab::kernels::detail {

namespace {

// Four Philox counters per call. Every 32-bit word lives in the low half of a
// 64-bit lane so that _mm256_mul_epu32 yields the full 64-bit product.
struct Lanes {
  __m256i c0, c1, c2, c3;
};

inline Lanes philox4_avx2(Lanes c, const std::uint32_t (&round_k0)[Philox4x32::kRounds],
                          const std::uint32_t (&round_k1)[Philox4x32::kRounds]) {
  const __m256i mul0 = _mm256_set1_epi64x(Philox4x32::kMul0);
  const __m256i mul1 = _mm256_set1_epi64x(Philox4x32::kMul1);
  const __m256i low32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  for (int r = 0; r < Philox4x32::kRounds; ++r) {
    const __m256i k0 = _mm256_set1_epi64x(round_k0[r]);
    const __m256i k1 = _mm256_set1_epi64x(round_k1[r]);
    const __m256i p0 = _mm256_mul_epu32(c.c0, mul0);
    const __m256i p1 = _mm256_mul_epu32(c.c2, mul1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    c = Lanes{_mm256_xor_si256(_mm256_xor_si256(hi1, c.c1), k0), _mm256_and_si256(p1, low32),
              _mm256_xor_si256(_mm256_xor_si256(hi0, c.c3), k1), _mm256_and_si256(p0, low32)};
  }
  return c;
}

}  // namespace

void fill_uniform_avx2(const StreamKey& key, std::uint32_t first, std::span<double> out) {
  std::uint32_t rk0[Philox4x32::kRounds];
  std::uint32_t rk1[Philox4x32::kRounds];
  {
    auto k = key.key();
    for (int r = 0; r < Philox4x32::kRounds; ++r) {
      rk0[r] = k[0];
      rk1[r] = k[1];
      k[0] += Philox4x32::kWeyl0;
      k[1] += Philox4x32::kWeyl1;
    }
  }
  const auto proto = key.counter(0);
  const __m256i c1 = _mm256_set1_epi64x(proto[1]);
  const __m256i c2 = _mm256_set1_epi64x(proto[2]);
  const __m256i c3 = _mm256_set1_epi64x(proto[3]);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  const std::size_t n = out.size();
  for (; i + 4 <= n; i += 4) {
    const std::uint32_t base = first + static_cast<std::uint32_t>(i);
    // Counter word 0 wraps at 2^32 exactly like the scalar path.
    const __m256i c0 = _mm256_set_epi64x(static_cast<std::uint32_t>(base + 3),
                                         static_cast<std::uint32_t>(base + 2),
                                         static_cast<std::uint32_t>(base + 1), base);
    const Lanes r = philox4_avx2(Lanes{c0, c1, c2, c3}, rk0, rk1);
    // bits = ((w1 << 32) | w0) >> 12 == (w1 << 20) | (w0 >> 12)
    const __m256i bits =
        _mm256_or_si256(_mm256_slli_epi64(r.c1, 20), _mm256_srli_epi64(r.c0, 12));
    const __m256d unit = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(bits, one_bits)), one);
    _mm256_storeu_pd(out.data() + i, unit);
  }
  for (; i < n; ++i) out[i] = uniform_at(key, first + static_cast<std::uint32_t>(i));
}

namespace {
template <int Predicate>
std::size_t threshold_avx2(std::span<const double> values, double threshold,
                           std::span<std::uint8_t> mask) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  const std::size_t n = values.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(v, t, Predicate));
    mask[i] = bits & 1;
    mask[i + 1] = (bits >> 1) & 1;
    mask[i + 2] = (bits >> 2) & 1;
    mask[i + 3] = (bits >> 3) & 1;
    count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits)));
  }
  for (; i < n; ++i) {
    const bool hit = Predicate == _CMP_LE_OQ ? values[i] <= threshold : values[i] < threshold;
    mask[i] = hit;
    count += hit;
  }
  return count;
}
}  // namespace

std::size_t threshold_le_avx2(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask) {
  return threshold_avx2<_CMP_LE_OQ>(values, threshold, mask);
}

std::size_t threshold_lt_avx2(std::span<const double> values, double threshold,
                              std::span<std::uint8_t> mask) {
  return threshold_avx2<_CMP_LT_OQ>(values, threshold, mask);
}

std::size_t count_le_avx2(std::span<const double> values, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  const std::size_t n = values.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d cmp = _mm256_cmp_pd(_mm256_loadu_pd(values.data() + i), t, _CMP_LE_OQ);
    acc = _mm256_sub_epi64(acc, _mm256_castpd_si256(cmp));  // all-ones lane == -1
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::size_t count = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  for (; i < n; ++i) count += values[i] <= threshold;
  return count;
}

}  // namespace perclab::kernels::detail
