#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specreg::geometry {

/// Axis-aligned box [lower_k, upper_k]^d.
class Domain {
 public:
  Domain(std::vector<double> lower, std::vector<double> upper);
  static Domain interval(double lo, double hi) { return Domain({lo}, {hi}); }
  static Domain cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t k) const { return lower_[k]; }
  double upper(std::size_t k) const { return upper_[k]; }
  double side(std::size_t k) const { return upper_[k] - lower_[k]; }
  bool contains(std::span<const double> x) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Non-empty set of pairwise distinct points in R^d, stored row-major.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords);
  static PointSet from_scalars(std::vector<double> xs) { return PointSet(1, std::move(xs)); }

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const { return coords_; }
  /// Dimension-major copy: coordinate k of point i at [k * size() + i].
  std::vector<double> dimension_major() const;

  /// Count requested from a generator before any rounding (equals size() otherwise).
  std::size_t requested_count() const { return requested_; }
  void set_requested_count(std::size_t n) { requested_ = n; }

  bool inside(const Domain& dom) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::size_t requested_;
};

enum class Scheme { uniform_grid, jittered_grid, halton, iid_uniform };

Scheme parse_scheme(std::string_view s);
std::string_view name(Scheme s) noexcept;

/// q = 1/2 min_{i != j} |x_i - x_j|_2, exact pairwise scan.
double separation_distance(const PointSet& x);

struct FillDistance {
  double value;      // max over evaluation grid of distance to nearest point
  double tolerance;  // grid-cell diagonal; true h lies in [value, value + tolerance]
  std::size_t grid_points;
};

inline constexpr std::size_t kDefaultGridCap = 10'000'000;

/// Grid approximation of the fill distance.  Grid coordinate i along axis k
/// is lower_k + side_k * i / (resolution - 1), i = 0..resolution-1.
FillDistance fill_distance(const PointSet& x, const Domain& dom, std::size_t resolution,
                           std::size_t max_cells = kDefaultGridCap);

/// Exact fill distance for d = 1: the largest of the boundary gaps and half
/// the largest interior gap.
double fill_distance_1d(const PointSet& x, const Domain& dom);

/// Deterministic for fixed (scheme, n, seed).  For uniform and jittered grids
/// with d > 1 the count is rounded down to the nearest d-th power;
/// requested_count() keeps the original n.
PointSet generate_points(Scheme scheme, long long n, const Domain& dom, std::uint64_t seed);

/// q / h for the grid approximation of h.
double quasi_uniformity_ratio(const PointSet& x, const Domain& dom, std::size_t resolution);

/// Radical inverse of `index` in `base` (Halton coordinate).
double radical_inverse(std::uint64_t index, std::uint32_t base);

void write_csv(const PointSet& x, std::ostream& os);
PointSet read_csv(std::istream& is);

}  // namespace specreg::geometry
