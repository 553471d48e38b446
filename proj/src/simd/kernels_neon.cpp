#include <arm_neon.h>

#include <algorithm>
#include <limits>

#include "kernels.hpp"

namespace specreg::simd::detail {

double min_sq_dist_neon(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride) {
  float64x2_t best2 = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      const float64x2_t diff = vsubq_f64(vdupq_n_f64(query[k]), vld1q_f64(coords + k * stride + i));
      acc = vaddq_f64(acc, vmulq_f64(diff, diff));
    }
    best2 = vminq_f64(best2, acc);
  }
  double best = vminvq_f64(best2);
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

void brownian_row_neon(double x, const double* nodes, double* out, std::size_t n) {
  const float64x2_t x2 = vdupq_n_f64(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vminq_f64(x2, vld1q_f64(nodes + i)));
  for (; i < n; ++i) out[i] = std::min(x, nodes[i]);
}

double brownian_expand_neon(double x, const double* nodes, const double* coeffs, std::size_t n) {
  const float64x2_t x2 = vdupq_n_f64(x);
  float64x2_t acc2 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t k = vminq_f64(x2, vld1q_f64(nodes + i));
    acc2 = vaddq_f64(acc2, vmulq_f64(k, vld1q_f64(coeffs + i)));
  }
  double acc = vaddvq_f64(acc2);
  for (; i < n; ++i) acc += coeffs[i] * std::min(x, nodes[i]);
  return acc;
}

}  // namespace specreg::simd::detail
