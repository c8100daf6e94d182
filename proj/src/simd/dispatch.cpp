#include <cstdlib>
#include <string_view>

#include "simd_variants.hpp"

namespace pgr::simd {

namespace {

bool cpu_has_avx2() {
#if defined(PGR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelSet& select_kernels() {
  if (const char* forced = std::getenv("PGR_SIMD"); forced && std::string_view(forced) == "scalar") {
    return scalar_kernels();
  }
  auto all = available_kernels();
  return *all.back();
}

}  // namespace

std::vector<const KernelSet*> available_kernels() {
  std::vector<const KernelSet*> out{&scalar_kernels()};
#if defined(PGR_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_kernels());
#endif
#if defined(PGR_HAVE_NEON)
  out.push_back(&neon_kernels());
#endif
  return out;
}

const KernelSet& active_kernels() {
  static const KernelSet& chosen = select_kernels();
  return chosen;
}

}  // namespace pgr::simd
