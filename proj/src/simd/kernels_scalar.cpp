#include <algorithm>
#include <limits>

#include "kernels.hpp"

namespace specreg::simd::detail {

double min_sq_dist_ref(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
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

void brownian_row_ref(double x, const double* nodes, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(x, nodes[i]);
}

double brownian_expand_ref(double x, const double* nodes, const double* coeffs, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += coeffs[i] * std::min(x, nodes[i]);
  return acc;
}

}  // namespace specreg::simd::detail
