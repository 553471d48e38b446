#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace specreg::quadrature {

/// Nodes and positive weights of a quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss-Legendre rule of the given order on [-1, 1] (Newton on P_order).
Rule gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre over consecutive breakpoints (sorted, distinct).
Rule composite(std::span<const double> breakpoints, std::size_t order);

/// `panels` equal panels on [lo, hi], additionally split at every extra
/// breakpoint strictly inside (lo, hi).
Rule composite_uniform(double lo, double hi, std::size_t panels, std::size_t order,
                       std::span<const double> extra_breaks = {});

/// Each panel of `breaks` split in two; used for error estimation.
std::vector<double> refine(std::span<const double> breaks);

/// Sorted, de-duplicated breakpoints of the composite_uniform rule.
std::vector<double> uniform_breaks(double lo, double hi, std::size_t panels,
                                   std::span<const double> extra_breaks = {});

}  // namespace specreg::quadrature
