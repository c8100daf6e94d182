// Compiled with -mavx2 on x86-64 only; callers reach these through the
// runtime dispatcher, never directly.
#include "simd_variants.hpp"

#if defined(PGR_HAVE_AVX2)
#include <immintrin.h>

namespace pgr::simd {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void dot_rows_avx2(const double* query, const double* rows, std::size_t n_rows,
                   std::size_t dim, double* out) {
  // Four rows per pass so each query load is reused.
  std::size_t r = 0;
  if (dim % 4 == 0) {
    for (; r + 4 <= n_rows; r += 4) {
      const double* r0 = rows + (r + 0) * dim;
      const double* r1 = rows + (r + 1) * dim;
      const double* r2 = rows + (r + 2) * dim;
      const double* r3 = rows + (r + 3) * dim;
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      for (std::size_t i = 0; i < dim; i += 4) {
        __m256d q = _mm256_loadu_pd(query + i);
        a0 = _mm256_add_pd(a0, _mm256_mul_pd(q, _mm256_loadu_pd(r0 + i)));
        a1 = _mm256_add_pd(a1, _mm256_mul_pd(q, _mm256_loadu_pd(r1 + i)));
        a2 = _mm256_add_pd(a2, _mm256_mul_pd(q, _mm256_loadu_pd(r2 + i)));
        a3 = _mm256_add_pd(a3, _mm256_mul_pd(q, _mm256_loadu_pd(r3 + i)));
      }
      out[r + 0] = hsum(a0);
      out[r + 1] = hsum(a1);
      out[r + 2] = hsum(a2);
      out[r + 3] = hsum(a3);
    }
  }
  for (; r < n_rows; ++r) out[r] = dot_avx2(query, rows + r * dim, dim);
}

}  // namespace

const KernelSet& avx2_kernels() {
  static const KernelSet set{"avx2", &dot_avx2, &dot_rows_avx2};
  return set;
}

}  // namespace pgr::simd
#endif
