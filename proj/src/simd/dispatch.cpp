#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels.hpp"
#include "specreg/error.hpp"
#include "specreg/simd.hpp"

namespace specreg::simd {

namespace {

constexpr KernelTable kScalar{detail::min_sq_dist_ref, detail::brownian_row_ref,
                              detail::brownian_expand_ref};
#if defined(SPECREG_HAVE_AVX2)
constexpr KernelTable kAvx2{detail::min_sq_dist_avx2, detail::brownian_row_avx2,
                            detail::brownian_expand_avx2};
#endif
#if defined(SPECREG_HAVE_NEON)
constexpr KernelTable kNeon{detail::min_sq_dist_neon, detail::brownian_row_neon,
                            detail::brownian_expand_neon};
#endif

bool cpu_has_avx2() noexcept {
#if defined(SPECREG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("SPECREG_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && supported(Backend::avx2)) return Backend::avx2;
    if (want == "neon" && supported(Backend::neon)) return Backend::neon;
  }
  return best_available();
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

std::string_view name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool supported(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    case Backend::neon:
#if defined(SPECREG_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend best_available() noexcept {
  if (supported(Backend::avx2)) return Backend::avx2;
  if (supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Backend active() noexcept { return current().load(std::memory_order_relaxed); }

void select(Backend b) {
  if (!supported(b)) {
    throw Error(ErrorCode::Unsupported, "SIMD backend " + std::string(name(b)) + " is not available");
  }
  current().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
  if (!supported(b)) {
    throw Error(ErrorCode::Unsupported, "SIMD backend " + std::string(name(b)) + " is not available");
  }
  switch (b) {
#if defined(SPECREG_HAVE_AVX2)
    case Backend::avx2: return kAvx2;
#endif
#if defined(SPECREG_HAVE_NEON)
    case Backend::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active_table() noexcept {
  switch (active()) {
#if defined(SPECREG_HAVE_AVX2)
    case Backend::avx2: return kAvx2;
#endif
#if defined(SPECREG_HAVE_NEON)
    case Backend::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

double min_sq_dist(std::span<const double> query, const double* coords, std::size_t n,
                   std::size_t stride) {
  if (stride < n) throw Error(ErrorCode::DimensionMismatch, "stride shorter than point count");
  return active_table().min_sq_dist(query.data(), coords, n, query.size(), stride);
}

void brownian_row(double x, std::span<const double> nodes, std::span<double> out) {
  if (out.size() != nodes.size()) throw Error(ErrorCode::DimensionMismatch, "row length");
  active_table().brownian_row(x, nodes.data(), out.data(), nodes.size());
}

double brownian_expand(double x, std::span<const double> nodes, std::span<const double> coeffs) {
  if (coeffs.size() != nodes.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient length");
  return active_table().brownian_expand(x, nodes.data(), coeffs.data(), nodes.size());
}

}  // namespace specreg::simd
