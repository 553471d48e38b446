#include "specreg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specreg/error.hpp"

namespace specreg::quadrature {

Rule gauss_legendre(std::size_t order) {
  if (order == 0) throw Error(ErrorCode::InvalidInput, "quadrature order must be positive");
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

Rule composite(std::span<const double> breakpoints, std::size_t order) {
  if (breakpoints.size() < 2) throw Error(ErrorCode::InvalidInput, "need at least one panel");
  const Rule base = gauss_legendre(order);
  Rule rule;
  rule.nodes.reserve((breakpoints.size() - 1) * order);
  rule.weights.reserve((breakpoints.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double lo = breakpoints[p];
    const double hi = breakpoints[p + 1];
    if (!(hi > lo)) throw Error(ErrorCode::InvalidInput, "breakpoints must be strictly increasing");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < order; ++i) {
      rule.nodes.push_back(mid + half * base.nodes[i]);
      rule.weights.push_back(half * base.weights[i]);
    }
  }
  return rule;
}

std::vector<double> uniform_breaks(double lo, double hi, std::size_t panels,
                                   std::span<const double> extra_breaks) {
  if (panels == 0 || !(hi > lo)) throw Error(ErrorCode::InvalidInput, "invalid composite interval");
  std::vector<double> breaks;
  breaks.reserve(panels + 1 + extra_breaks.size());
  for (std::size_t p = 0; p <= panels; ++p) {
    breaks.push_back(p == panels ? hi : lo + (hi - lo) * static_cast<double>(p) / panels);
  }
  for (double b : extra_breaks) {
    if (b > lo && b < hi) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  // Drop panels narrower than a few ulps of the interval.
  const double min_width = 1e-13 * (hi - lo);
  std::vector<double> out;
  out.reserve(breaks.size());
  for (double b : breaks) {
    if (out.empty() || b - out.back() > min_width) out.push_back(b);
  }
  out.back() = hi;
  return out;
}

Rule composite_uniform(double lo, double hi, std::size_t panels, std::size_t order,
                       std::span<const double> extra_breaks) {
  const auto breaks = uniform_breaks(lo, hi, panels, extra_breaks);
  return composite(breaks, order);
}

std::vector<double> refine(std::span<const double> breaks) {
  std::vector<double> out;
  out.reserve(2 * breaks.size());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    out.push_back(breaks[i]);
    out.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }
  if (!breaks.empty()) out.push_back(breaks.back());
  return out;
}

}  // namespace specreg::quadrature
