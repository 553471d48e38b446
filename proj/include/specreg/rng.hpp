#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace specreg {

/// Deterministic generator used everywhere randomness is needed.
///
/// Engine: std::mt19937_64 (fully specified by the C++ standard, so streams
/// are identical across platforms).  Uniforms take the top 53 bits of each
/// draw.  Gaussians use the Box-Muller transform and consume engine draws in
/// pairs; the second variate of each pair is cached and returned next.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace specreg
