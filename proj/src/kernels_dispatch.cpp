#include <cstdlib>
#include <string_view>

#include "perclab/kernels.hpp"

namespace perclab::kernels {

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar", detail::fill_uniform_scalar, detail::threshold_le_scalar,
                                 detail::threshold_lt_scalar, detail::count_le_scalar};
  return table;
}

const KernelTable* avx2_table() noexcept {
#if defined(PERCLAB_HAVE_AVX2_TU)
  static const KernelTable table{"avx2", detail::fill_uniform_avx2, detail::threshold_le_avx2,
                                 detail::threshold_lt_avx2, detail::count_le_avx2};
  return &table;
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {
const KernelTable& choose() noexcept {
  if (const char* env = std::getenv("PERC_LAB_SIMD"); env && std::string_view(env) == "scalar") {
    return scalar_table();
  }
  if (const auto* avx2 = avx2_table(); avx2 && cpu_has_avx2()) return *avx2;
  return scalar_table();
}
}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace perclab::kernels
