#include "simd_variants.hpp"

#if defined(PGR_HAVE_NEON)
#include <arm_neon.h>

namespace pgr::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void dot_rows_neon(const double* query, const double* rows, std::size_t n_rows,
                   std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = dot_neon(query, rows + r * dim, dim);
}

}  // namespace

const KernelSet& neon_kernels() {
  static const KernelSet set{"neon", &dot_neon, &dot_rows_neon};
  return set;
}

}  // namespace pgr::simd
#endif
