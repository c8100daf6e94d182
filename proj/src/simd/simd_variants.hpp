#pragma once

#include "pgr/simd/kernels.hpp"

namespace pgr::simd {
#if defined(PGR_HAVE_AVX2)
const KernelSet& avx2_kernels();
#endif
#if defined(PGR_HAVE_NEON)
const KernelSet& neon_kernels();
#endif
}  // namespace pgr::simd
