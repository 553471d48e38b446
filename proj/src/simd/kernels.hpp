#pragma once

#include <cstddef>

namespace specreg::simd::detail {

double min_sq_dist_ref(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride);
void brownian_row_ref(double x, const double* nodes, double* out, std::size_t n);
double brownian_expand_ref(double x, const double* nodes, const double* coeffs, std::size_t n);

#if defined(SPECREG_HAVE_AVX2)
double min_sq_dist_avx2(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride);
void brownian_row_avx2(double x, const double* nodes, double* out, std::size_t n);
double brownian_expand_avx2(double x, const double* nodes, const double* coeffs, std::size_t n);
#endif

#if defined(SPECREG_HAVE_NEON)
double min_sq_dist_neon(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride);
void brownian_row_neon(double x, const double* nodes, double* out, std::size_t n);
double brownian_expand_neon(double x, const double* nodes, const double* coeffs, std::size_t n);
#endif

}  // namespace specreg::simd::detail
