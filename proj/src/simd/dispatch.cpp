#include <cstdlib>
#include <string_view>

#include "tscale/simd/reduce.hpp"

namespace tscale::simd {

#if defined(TSCALE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(TSCALE_HAVE_NEON)
const KernelTable& neon_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(TSCALE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(TSCALE_HAVE_NEON)
  // NEON is baseline on AArch64.
  return &neon_table();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("TSCALE_SIMD");
  const std::string_view want = forced ? forced : "";
  if (want == "scalar") return scalar_kernels();
  if (want.empty() || want == "avx2") {
    if (const auto* k = avx2_kernels()) return *k;
  }
  if (want.empty() || want == "neon") {
    if (const auto* k = neon_kernels()) return *k;
  }
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace tscale::simd
