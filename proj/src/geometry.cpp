#include "specreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/rng.hpp"
#include "specreg/simd.hpp"

namespace specreg::geometry {

Domain::Domain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw Error(ErrorCode::DimensionZero, "domain dimension must be >= 1");
  if (lower_.size() != upper_.size()) throw Error(ErrorCode::DimensionMismatch, "domain bounds");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] < upper_[k]) || !std::isfinite(lower_[k]) || !std::isfinite(upper_[k])) {
      throw Error(ErrorCode::InvalidInput, "domain requires finite lower < upper on every axis");
    }
  }
}

Domain Domain::cube(std::size_t dim, double lo, double hi) {
  return Domain(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool Domain::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (x[k] < lower_[k] || x[k] > upper_[k]) return false;
  }
  return true;
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)), requested_(0) {
  if (dim_ == 0) throw Error(ErrorCode::DimensionZero, "point dimension must be >= 1");
  if (coords_.empty()) throw Error(ErrorCode::EmptyPointSet, "point set has no points");
  if (coords_.size() % dim_ != 0) throw Error(ErrorCode::DimensionMismatch, "ragged coordinates");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFinite, "point coordinate is not finite");
  }
  requested_ = size();

  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = point(a);
    const auto pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto pa = point(order[i - 1]);
    const auto pb = point(order[i]);
    if (std::equal(pa.begin(), pa.end(), pb.begin())) {
      throw Error(ErrorCode::InvalidInput, "point set contains duplicate points");
    }
  }
}

std::vector<double> PointSet::dimension_major() const {
  const std::size_t n = size();
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) out[k * n + i] = coords_[i * dim_ + k];
  }
  return out;
}

bool PointSet::inside(const Domain& dom) const {
  if (dom.dim() != dim_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!dom.contains(point(i))) return false;
  }
  return true;
}

Scheme parse_scheme(std::string_view s) {
  if (s == "uniform-grid") return Scheme::uniform_grid;
  if (s == "jittered-grid") return Scheme::jittered_grid;
  if (s == "halton") return Scheme::halton;
  if (s == "iid-uniform") return Scheme::iid_uniform;
  throw Error(ErrorCode::InvalidInput, "unknown point scheme '" + std::string(s) + "'");
}

std::string_view name(Scheme s) noexcept {
  switch (s) {
    case Scheme::uniform_grid: return "uniform-grid";
    case Scheme::jittered_grid: return "jittered-grid";
    case Scheme::halton: return "halton";
    case Scheme::iid_uniform: return "iid-uniform";
  }
  return "unknown";
}

double separation_distance(const PointSet& x) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "separation distance needs at least 2 points");
  const std::vector<double> soa = x.dimension_major();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    best = std::min(best, simd::min_sq_dist(x.point(i), soa.data() + i + 1, n - i - 1, n));
  }
  return 0.5 * std::sqrt(best);
}

FillDistance fill_distance(const PointSet& x, const Domain& dom, std::size_t resolution,
                           std::size_t max_cells) {
  const std::size_t d = dom.dim();
  if (x.dim() != d) throw Error(ErrorCode::DimensionMismatch, "point/domain dimension");
  if (resolution < 2) throw Error(ErrorCode::InvalidInput, "resolution must be >= 2");

  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (total > max_cells / resolution) {
      throw Error(ErrorCode::GridTooLarge, "evaluation grid exceeds cap of " + std::to_string(max_cells));
    }
    total *= resolution;
  }

  const std::size_t n = x.size();
  const std::vector<double> soa = x.dimension_major();
  const double denom = static_cast<double>(resolution - 1);

  std::vector<std::size_t> index(d, 0);
  std::vector<double> query(d);
  double worst = 0.0;
  for (std::size_t cell = 0; cell < total; ++cell) {
    for (std::size_t k = 0; k < d; ++k) {
      query[k] = dom.lower(k) + dom.side(k) * static_cast<double>(index[k]) / denom;
    }
    worst = std::max(worst, simd::min_sq_dist(query, soa.data(), n, n));
    // Last axis varies fastest.
    for (std::size_t k = d; k-- > 0;) {
      if (++index[k] < resolution) break;
      index[k] = 0;
    }
  }

  double diag = 0.0;
  for (std::size_t k = 0; k < d; ++k) diag += std::pow(dom.side(k) / denom, 2);
  return {std::sqrt(worst), std::sqrt(diag), total};
}

namespace {

std::size_t integer_root(std::size_t n, std::size_t d) {
  auto ipow = [](std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
  };
  auto m = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
  while (m > 1 && ipow(m, d) > n) --m;
  while (ipow(m + 1, d) <= n) ++m;
  return std::max<std::size_t>(m, 1);
}

constexpr std::uint32_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                     43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

// Lattice over m^d cells, last axis fastest; `place` maps (axis, index) to a coordinate.
template <class Place>
std::vector<double> lattice(std::size_t m, std::size_t d, Place&& place) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= m;
  std::vector<double> coords;
  coords.reserve(total * d);
  std::vector<std::size_t> index(d, 0);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t k = 0; k < d; ++k) coords.push_back(place(k, index[k]));
    for (std::size_t k = d; k-- > 0;) {
      if (++index[k] < m) break;
      index[k] = 0;
    }
  }
  return coords;
}

}  // namespace

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

PointSet generate_points(Scheme scheme, long long n_req, const Domain& dom, std::uint64_t seed) {
  if (n_req <= 0) throw Error(ErrorCode::InvalidCount, "point count must be positive");
  const auto n = static_cast<std::size_t>(n_req);
  const std::size_t d = dom.dim();
  std::vector<double> coords;

  switch (scheme) {
    case Scheme::uniform_grid: {
      const std::size_t m = d == 1 ? n : integer_root(n, d);
      coords = lattice(m, d, [&](std::size_t k, std::size_t i) {
        if (m == 1) return dom.lower(k) + 0.5 * dom.side(k);
        if (i + 1 == m) return dom.upper(k);
        return dom.lower(k) + dom.side(k) * static_cast<double>(i) / static_cast<double>(m - 1);
      });
      break;
    }
    case Scheme::jittered_grid: {
      const std::size_t m = d == 1 ? n : integer_root(n, d);
      Rng rng(seed);
      coords = lattice(m, d, [&](std::size_t k, std::size_t i) {
        const double w = dom.side(k) / static_cast<double>(m);
        return dom.lower(k) + w * (static_cast<double>(i) + rng.uniform());
      });
      break;
    }
    case Scheme::halton: {
      if (d > std::size(kPrimes)) throw Error(ErrorCode::InvalidInput, "halton supports d <= 25");
      coords.reserve(n * d);
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
          coords.push_back(dom.lower(k) + dom.side(k) * radical_inverse(i, kPrimes[k]));
        }
      }
      break;
    }
    case Scheme::iid_uniform: {
      Rng rng(seed);
      coords.reserve(n * d);
      for (std::size_t i = 0; i < n * d; ++i) coords.push_back(rng.uniform(dom.lower(i % d), dom.upper(i % d)));
      break;
    }
  }

  PointSet out(d, std::move(coords));
  out.set_requested_count(n);
  return out;
}

double fill_distance_1d(const PointSet& x, const Domain& dom) {
  if (x.dim() != 1 || dom.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "fill_distance_1d needs d = 1");
  if (!x.inside(dom)) throw Error(ErrorCode::DomainViolation, "points outside the domain");
  std::vector<double> v(x.coords().begin(), x.coords().end());
  std::sort(v.begin(), v.end());
  double h = std::max(v.front() - dom.lower(0), dom.upper(0) - v.back());
  for (std::size_t i = 1; i < v.size(); ++i) h = std::max(h, 0.5 * (v[i] - v[i - 1]));
  return h;
}

double quasi_uniformity_ratio(const PointSet& x, const Domain& dom, std::size_t resolution) {
  const double q = separation_distance(x);
  const FillDistance h = fill_distance(x, dom, resolution);
  return q / h.value;
}

void write_csv(const PointSet& x, std::ostream& os) {
  for (std::size_t k = 0; k < x.dim(); ++k) os << (k ? "," : "") << "x_" << (k + 1);
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = x.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << p[k];
    os << '\n';
  }
}

PointSet read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::IoError, "missing CSV header");
  const std::size_t d = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> coords;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      try {
        coords.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "bad CSV number '" + cell + "'");
      }
      ++cols;
    }
    if (cols != d) throw Error(ErrorCode::IoError, "CSV row has wrong column count");
  }
  return PointSet(d, std::move(coords));
}

}  // namespace specreg::geometry
