#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pgr::simd {

/// One implementation of the similarity-scan inner loops.
///
/// Every kernel set computes the same sums; only the accumulation order
/// differs. For inputs on the embedding quantization grid (multiples of
/// 2^-20 with unit L2 norm) every partial sum is exactly representable, so
/// all kernel sets agree bit for bit. For arbitrary doubles they agree to
/// rounding.
struct KernelSet {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// out[r] = dot(query, rows + r * dim) for r in [0, n_rows).
  void (*dot_rows)(const double* query, const double* rows, std::size_t n_rows,
                   std::size_t dim, double* out);
};

const KernelSet& scalar_kernels();

/// Kernel sets compiled in and supported by the running CPU, scalar first.
std::vector<const KernelSet*> available_kernels();

/// Widest supported kernel set. `PGR_SIMD=scalar` in the environment forces
/// the reference path.
const KernelSet& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace pgr::simd
