#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops with a scalar reference implementation and
// vectorized variants selected at runtime.  The active backend can be forced
// with SPECREG_SIMD=scalar|avx2|neon or with select().

namespace specreg::simd {

enum class Backend { scalar, avx2, neon };

std::string_view name(Backend b) noexcept;
bool supported(Backend b) noexcept;
Backend best_available() noexcept;
Backend active() noexcept;
/// Throws Error(Unsupported) if `b` is not available on this build/CPU.
void select(Backend b);

struct KernelTable {
  // min_i sum_k (query[k] - coords[k*n + i])^2 with coords stored dimension-major.
  double (*min_sq_dist)(const double* query, const double* coords, std::size_t n, std::size_t dim,
                       std::size_t stride);
  // out[i] = min(x, nodes[i])
  void (*brownian_row)(double x, const double* nodes, double* out, std::size_t n);
  // sum_i coeffs[i] * min(x, nodes[i])
  double (*brownian_expand)(double x, const double* nodes, const double* coeffs, std::size_t n);
};

/// Table for a specific backend; used by the equivalence tests.
const KernelTable& table(Backend b);
const KernelTable& active_table() noexcept;

// Convenience wrappers over the active table.  The distance kernel is exact:
// every backend accumulates dimensions in the same order without fused
// multiply-add, so results are bit-identical across backends.
/// `coords` is a dimension-major block: coordinate k of point i at coords[k*stride + i].
double min_sq_dist(std::span<const double> query, const double* coords, std::size_t n,
                   std::size_t stride);
void brownian_row(double x, std::span<const double> nodes, std::span<double> out);
double brownian_expand(double x, std::span<const double> nodes, std::span<const double> coeffs);

}  // namespace specreg::simd
