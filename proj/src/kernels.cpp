#include "specreg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/quadrature.hpp"
#include "specreg/simd.hpp"

namespace specreg::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_dist(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
  return acc;
}

}  // namespace

std::string_view name(Family f) noexcept {
  switch (f) {
    case Family::brownian: return "brownian";
    case Family::gaussian_autocorrelation: return "gaussian-autocorrelation";
    case Family::imq: return "imq";
    case Family::operator_induced: return "operator-induced";
  }
  return "unknown";
}

KernelModel KernelModel::brownian() { return KernelModel(Family::brownian, 1.0, 1, 0.0); }

KernelModel KernelModel::gaussian_autocorrelation(double scale, std::size_t dim) {
  if (!(scale > 0.0) || dim == 0) throw Error(ErrorCode::InvalidInput, "gaussian scale/dimension");
  return KernelModel(Family::gaussian_autocorrelation, kInf, dim, scale);
}

KernelModel KernelModel::imq(double shape, std::size_t dim) {
  if (!(shape > 0.0) || dim == 0) throw Error(ErrorCode::InvalidInput, "imq shape/dimension");
  return KernelModel(Family::imq, kInf, dim, shape);
}

KernelModel KernelModel::operator_induced(std::shared_ptr<const FeatureMap> map, std::size_t order) {
  if (!map) throw Error(ErrorCode::InvalidInput, "operator-induced kernel needs a feature map");
  KernelModel k(Family::operator_induced, map->smoothness(), 1, 0.0);
  k.order_ = order;
  k.map_ = std::move(map);
  return k;
}

void KernelModel::check_point(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "point dimension does not match kernel");
  for (double c : x) {
    if (!std::isfinite(c)) throw Error(ErrorCode::DomainViolation, "non-finite point");
  }
  if (family_ == Family::brownian && (x[0] < 0.0 || x[0] > 1.0)) {
    throw Error(ErrorCode::DomainViolation, "brownian kernel is defined on [0, 1]");
  }
  if (family_ == Family::operator_induced && !map_->domain().contains(x)) {
    throw Error(ErrorCode::DomainViolation, "point outside the operator domain");
  }
}

double KernelModel::eval(std::span<const double> x, std::span<const double> y) const {
  check_point(x);
  check_point(y);
  switch (family_) {
    case Family::brownian:
      return std::min(x[0], y[0]);
    case Family::gaussian_autocorrelation: {
      const double s = param_;
      const double amp = std::pow(s * std::sqrt(std::numbers::pi / 2.0), static_cast<double>(dim_));
      return amp * std::exp(-sq_dist(x, y) / (2.0 * s * s));
    }
    case Family::imq:
      return 1.0 / std::sqrt(1.0 + param_ * param_ * sq_dist(x, y));
    case Family::operator_induced: {
      const auto [ax, bx] = map_->support(x[0]);
      const auto [ay, by] = map_->support(y[0]);
      const double lo = std::max(ax, ay);
      const double hi = std::min(bx, by);
      if (!(hi > lo)) return 0.0;
      std::vector<double> kinks = map_->kinks(x[0]);
      const auto more = map_->kinks(y[0]);
      kinks.insert(kinks.end(), more.begin(), more.end());
      const auto rule = quadrature::composite_uniform(lo, hi, 4, order_, kinks);
      return rule.integrate([&](double t) { return map_->value(x[0], t) * map_->value(y[0], t); });
    }
  }
  return 0.0;
}

nlohmann::json KernelModel::to_json() const {
  nlohmann::json j;
  j["family"] = std::string(name(family_));
  switch (family_) {
    case Family::brownian: j["params"] = nlohmann::json::object(); break;
    case Family::gaussian_autocorrelation: j["params"] = {{"scale", param_}, {"dimension", dim_}}; break;
    case Family::imq: j["params"] = {{"shape", param_}, {"dimension", dim_}}; break;
    case Family::operator_induced: j["params"] = {{"operator", map_->name()}, {"order", order_}}; break;
  }
  return j;
}

std::string KernelModel::describe() const {
  std::ostringstream os;
  os << name(family_);
  if (family_ == Family::gaussian_autocorrelation) os << "(scale=" << param_ << ")";
  if (family_ == Family::imq) os << "(shape=" << param_ << ")";
  if (family_ == Family::operator_induced) os << "(" << map_->name() << ")";
  return os.str();
}

KernelModel from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("family")) {
    throw Error(ErrorCode::ConfigInvalid, "kernel spec needs a \"family\" field");
  }
  const auto family = spec.at("family").get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  const auto dim = params.value("dimension", std::size_t{1});
  if (family == "brownian") return KernelModel::brownian();
  if (family == "gaussian-autocorrelation") {
    return KernelModel::gaussian_autocorrelation(params.value("scale", 1.0), dim);
  }
  if (family == "imq") return KernelModel::imq(params.value("shape", 1.0), dim);
  if (family == "operator-induced") {
    throw Error(ErrorCode::ConfigInvalid, "operator-induced kernels are built from a forward problem");
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown kernel family '" + family + "'");
}

linalg::Matrix gram(const KernelModel& k, const geometry::PointSet& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  linalg::Matrix m(n, n);
  if (k.family() == Family::brownian) {
    for (std::size_t i = 0; i < x.size(); ++i) k.check_point(x.point(i));
    std::vector<double> row(x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      simd::brownian_row(x.coords()[i], x.coords(), row);
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[j];
    }
    return m;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = k.eval(x.point(i), x.point(j));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

linalg::Matrix cross_gram(const KernelModel& k, const geometry::PointSet& y,
                          const geometry::PointSet& x) {
  linalg::Matrix m(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(x.size()));
  if (k.family() == Family::brownian) {
    for (std::size_t j = 0; j < x.size(); ++j) k.check_point(x.point(j));
    std::vector<double> row(x.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      k.check_point(y.point(i));
      simd::brownian_row(y.coords()[i], x.coords(), row);
      for (std::size_t j = 0; j < x.size(); ++j) m(i, j) = row[j];
    }
    return m;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) m(i, j) = k.eval(y.point(i), x.point(j));
  }
  return m;
}

double expand(const KernelModel& k, const geometry::PointSet& x, std::span<const double> coeffs,
              std::span<const double> z) {
  if (coeffs.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient length");
  k.check_point(z);
  if (k.family() == Family::brownian) return simd::brownian_expand(z[0], x.coords(), coeffs);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += coeffs[i] * k.eval(z, x.point(i));
  return acc;
}

double rkhs_norm_expansion(const KernelModel& k, const geometry::PointSet& x,
                           std::span<const double> coeffs) {
  if (coeffs.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient length");
  const linalg::Matrix m = gram(k, x);
  const Eigen::Map<const linalg::Vector> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  const double q = c.dot(m * c);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace specreg::kernels
