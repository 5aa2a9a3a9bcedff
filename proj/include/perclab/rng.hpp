#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace perclab {

/// Philox4x32-10 (Salmon et al., Random123). A counter-based generator: the
/// output is a pure function of (counter, key), which is what makes every
/// random quantity in this library addressable by coordinates.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter apply(Counter c, Key k) noexcept {
    for (int r = 0; r < kRounds; ++r) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return c;
  }
};

/// Independent random streams. Each tag selects a disjoint slice of the
/// counter space, so e.g. ghost fields are independent of edge weights.
enum class Stream : std::uint32_t {
  kEdgeWeights = 0x45444745u,  // "EDGE"
  kGhosts = 0x47485354u,       // "GHST"
  kAuxiliary = 0x41555820u,    // "AUX "
  kShiftCopy = 0x53484654u,   // "SHFT", second independent percolation copy
};

/// Coordinates of one random field: base seed, trial index, stream.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  Stream stream = Stream::kEdgeWeights;

  constexpr Philox4x32::Key key() const noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
  constexpr Philox4x32::Counter counter(std::uint32_t index) const noexcept {
    return {index, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
            static_cast<std::uint32_t>(stream)};
  }
};

/// 52 random mantissa bits from two Philox words, mapped to [0, 1).
/// Bit-exact with the SIMD kernels (same exponent trick).
constexpr double words_to_unit(std::uint32_t lo, std::uint32_t hi) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
  return std::bit_cast<double>(bits | 0x3FF0000000000000ull) - 1.0;
}

/// Uniform in [0, 1) for element `index` of the field addressed by `key`.
constexpr double uniform_at(const StreamKey& key, std::uint32_t index) noexcept {
  const auto out = Philox4x32::apply(key.counter(index), key.key());
  return words_to_unit(out[0], out[1]);
}

/// Small sequential generator for incidental choices (sampling vertex pairs,
/// shuffles in tests). Never used for percolation fields.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// Uniform integer in [0, bound).
  constexpr std::uint64_t below(std::uint64_t bound) noexcept { return bound ? next() % bound : 0; }
  constexpr double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  constexpr result_type operator()() noexcept { return next(); }

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with an index; used to derive child seeds.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  SplitMix64 sm(base ^ (index * 0xD1B54A32D192ED03ull));
  sm.next();
  return sm.next();
}

}  // namespace perclab
