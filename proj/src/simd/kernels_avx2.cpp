// Compiled with -mavx2 -ffp-contract=off; only called after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "kernels.hpp"

namespace specreg::simd::detail {

namespace {

inline double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_min_pd(lo, hi);
  m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

}  // namespace

double min_sq_dist_avx2(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride) {
  __m256d best4 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d q = _mm256_set1_pd(query[k]);
      const __m256d diff = _mm256_sub_pd(q, _mm256_loadu_pd(coords + k * stride + i));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    best4 = _mm256_min_pd(best4, acc);
  }
  double best = hmin(best4);
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = query[k] - coords[k * stride + i];
      const double sq = diff * diff;
      acc = acc + sq;
    }
    best = std::min(best, acc);
  }
  return best;
}

void brownian_row_avx2(double x, const double* nodes, double* out, std::size_t n) {
  const __m256d x4 = _mm256_set1_pd(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_min_pd(x4, _mm256_loadu_pd(nodes + i)));
  }
  for (; i < n; ++i) out[i] = std::min(x, nodes[i]);
}

double brownian_expand_avx2(double x, const double* nodes, const double* coeffs, std::size_t n) {
  const __m256d x4 = _mm256_set1_pd(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d k0 = _mm256_min_pd(x4, _mm256_loadu_pd(nodes + i));
    const __m256d k1 = _mm256_min_pd(x4, _mm256_loadu_pd(nodes + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(k0, _mm256_loadu_pd(coeffs + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(k1, _mm256_loadu_pd(coeffs + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += coeffs[i] * std::min(x, nodes[i]);
  return acc;
}

}  // namespace specreg::simd::detail
