#include "specreg/operators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "specreg/error.hpp"
#include "specreg/linalg.hpp"
#include "specreg/quadrature.hpp"

namespace specreg::operators {

namespace {

using std::numbers::pi;

// Gaussian feature tails below exp(-81) are dropped.
constexpr double kGaussianHalfWidth = 9.0;

class IndicatorMap final : public kernels::FeatureMap {
 public:
  std::string name() const override { return "integration"; }
  double value(double x, double t) const override { return (t >= 0.0 && t <= x) ? 1.0 : 0.0; }
  std::pair<double, double> support(double x) const override { return {0.0, x}; }
  double smoothness() const override { return 1.0; }
  geometry::Domain domain() const override { return geometry::Domain::interval(0.0, 1.0); }
};

class GaussianMap final : public kernels::FeatureMap {
 public:
  explicit GaussianMap(geometry::Domain dom) : dom_(std::move(dom)) {}
  std::string name() const override { return "gaussian-convolution"; }
  double value(double x, double t) const override { return std::exp(-(x - t) * (x - t)); }
  std::pair<double, double> support(double x) const override {
    return {x - kGaussianHalfWidth, x + kGaussianHalfWidth};
  }
  double smoothness() const override { return std::numeric_limits<double>::infinity(); }
  geometry::Domain domain() const override { return dom_; }

 private:
  geometry::Domain dom_;
};

// Largest eigenvalue of the integral operator with kernel K on the domain
// (Nystrom on a composite Gauss-Legendre rule); equals sigma_max^2 of A.
double nystrom_sigma_max(const kernels::KernelModel& k, const geometry::Domain& dom) {
  const auto rule = quadrature::composite_uniform(dom.lower(0), dom.upper(0), 24, 10);
  const auto n = static_cast<Eigen::Index>(rule.size());
  linalg::Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = std::sqrt(rule.weights[i] * rule.weights[j]) * k.eval(rule.nodes[i], rule.nodes[j]);
    }
  }
  return std::sqrt(linalg::sym_eig(m).max_eigenvalue());
}

}  // namespace

ForwardProblem ForwardProblem::integration() {
  return ForwardProblem(OperatorKind::integration, geometry::Domain::interval(0.0, 1.0),
                        kernels::KernelModel::brownian(), std::make_shared<IndicatorMap>(),
                        2.0 / pi, 1.0);
}

ForwardProblem ForwardProblem::gaussian_convolution(const geometry::Domain& dom) {
  if (dom.dim() != 1) throw Error(ErrorCode::InvalidInput, "gaussian convolution is one-dimensional");
  auto k = kernels::KernelModel::gaussian_autocorrelation(1.0, 1);
  const double smax = nystrom_sigma_max(k, dom);
  return ForwardProblem(OperatorKind::gaussian_convolution, dom, k, std::make_shared<GaussianMap>(dom),
                        smax, std::sqrt(pi / 2.0));
}

std::string ForwardProblem::name() const { return map_->name(); }

kernels::KernelModel ForwardProblem::induced_kernel(std::size_t order) const {
  return kernels::KernelModel::operator_induced(map_, order);
}

double ForwardProblem::feature_norm_sq(double x) const {
  if (!domain_.contains(std::span(&x, 1))) throw Error(ErrorCode::DomainViolation, "x outside domain");
  switch (kind_) {
    case OperatorKind::integration: return x;
    case OperatorKind::gaussian_convolution: return std::sqrt(pi / 2.0);
  }
  return 0.0;
}

double ForwardProblem::apply(const Function& f, double x) const {
  if (!domain_.contains(std::span(&x, 1))) throw Error(ErrorCode::DomainViolation, "x outside domain");
  const auto [lo, hi] = map_->support(x);
  if (!(hi > lo)) return 0.0;
  const auto rule = quadrature::composite_uniform(lo, hi, 16, 20);
  return rule.integrate([&](double t) { return f(t) * map_->value(x, t); });
}

std::vector<double> sample_data(const ForwardProblem& p, const SourcePair& s, const geometry::PointSet& x) {
  if (x.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "problems are one-dimensional");
  std::vector<double> y;
  y.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!p.domain().contains(x.point(i))) {
      throw Error(ErrorCode::DomainViolation, "sampling point outside the problem domain");
    }
    y.push_back(s.g(x.point(i)[0]));
  }
  return y;
}

SingularTriple analytic_svd_integration(long long j) {
  if (j < 1) throw Error(ErrorCode::InvalidIndex, "singular index must be >= 1");
  const double w = (static_cast<double>(j) - 0.5) * pi;
  return {1.0 / w, [w](double x) { return std::numbers::sqrt2 * std::sin(w * x); },
          [w](double t) { return std::numbers::sqrt2 * std::cos(w * t); }};
}

std::vector<SourcePair> builtin_source_pairs(const ForwardProblem& p) {
  switch (p.kind()) {
    case OperatorKind::integration: {
      const auto s1 = analytic_svd_integration(1);
      return {
          {"constant", [](double) { return 1.0; }, [](double x) { return x; }, 1.0},
          {"cosine", [](double t) { return std::cos(2.0 * pi * t); },
           [](double x) { return std::sin(2.0 * pi * x) / (2.0 * pi); }, 1.0 / std::numbers::sqrt2},
          {"first-singular", s1.v, [s1](double x) { return s1.sigma * s1.u(x); }, 1.0},
      };
    }
    case OperatorKind::gaussian_convolution: {
      // f(t) = exp(-t^2); g = f * exp(-s^2) = sqrt(pi/2) exp(-x^2/2); A is injective so
      // ||g||_{H_K} = ||f||_{L2(R)} = (pi/2)^{1/4}.
      return {
          {"gaussian-bump", [](double t) { return std::exp(-t * t); },
           [](double x) { return std::sqrt(pi / 2.0) * std::exp(-0.5 * x * x); }, std::pow(pi / 2.0, 0.25)},
      };
    }
  }
  return {};
}

OperatorConstants operator_constants(const ForwardProblem& p, const geometry::PointSet& x) {
  double trace = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) trace += p.kernel().eval(x.point(i), x.point(i));
  return {p.sigma_max(), p.c_phi_sq(), trace / static_cast<double>(x.size())};
}

ForwardProblem problem_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("operator")) {
    throw Error(ErrorCode::ConfigInvalid, "problem spec needs an \"operator\" field");
  }
  const auto op = spec.at("operator").get<std::string>();
  if (op == "integration") {
    if (spec.contains("domain")) {
      const auto d = spec.at("domain").get<std::vector<double>>();
      if (d.size() != 2 || d[0] != 0.0 || d[1] != 1.0) {
        throw Error(ErrorCode::ConfigInvalid, "integration operator lives on [0, 1]");
      }
    }
    return ForwardProblem::integration();
  }
  if (op == "gaussian-convolution") {
    const auto d = spec.value("domain", std::vector<double>{-3.0, 3.0});
    if (d.size() != 2) throw Error(ErrorCode::ConfigInvalid, "domain must be [lo, hi]");
    return ForwardProblem::gaussian_convolution(geometry::Domain::interval(d[0], d[1]));
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown operator '" + op + "'");
}

SourcePair source_from_json(const ForwardProblem& p, const nlohmann::json& which) {
  const auto pairs = builtin_source_pairs(p);
  if (which.is_number_integer()) {
    const auto i = which.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= pairs.size()) {
      throw Error(ErrorCode::ConfigInvalid, "source pair index out of range");
    }
    return pairs[static_cast<std::size_t>(i)];
  }
  if (which.is_string()) {
    for (const auto& s : pairs) {
      if (s.name == which.get<std::string>()) return s;
    }
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown source pair " + which.dump());
}

kernels::KernelModel parse_kernel(const nlohmann::json& spec, const ForwardProblem& p) {
  if (spec.is_object() && spec.value("family", std::string{}) == "operator-induced") {
    const auto params = spec.value("params", nlohmann::json::object());
    return p.induced_kernel(params.value("order", std::size_t{64}));
  }
  return kernels::from_json(spec);
}

}  // namespace specreg::operators
