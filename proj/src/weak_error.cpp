#include "specreg/weak_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"

namespace specreg::weak_error {

namespace {

constexpr double kResolutionTol = 1e-6;
constexpr double kFloor = 64.0 * std::numeric_limits<double>::epsilon();

// Node coordinates strictly inside (lo, hi) for kernels whose sections kink at the nodes.
std::vector<double> kink_breaks(const regularization::GramSystem& sys, double lo, double hi) {
  std::vector<double> out;
  if (!sys.kernel().has_kinks()) return out;
  for (double x : sys.nodes().coords()) {
    if (x > lo && x < hi) out.push_back(x);
  }
  return out;
}

struct Evaluated {
  double pairing = 0.0;
  double err_sq = 0.0;  // int (g_hat - g)^2
  double ref_sq = 0.0;  // int g_hat^2 + g^2
};

Evaluated integrate_error(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s,
                          const Function& g_true, const quadrature::Rule& rule) {
  Evaluated out;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.nodes[q];
    const double gh = regularization::evaluate_g(s, x);
    const double g = g_true(x);
    const double e = gh - g;
    out.pairing += rule.weights[q] * psi.psi0(x) * e;
    out.err_sq += rule.weights[q] * e * e;
    out.ref_sq += rule.weights[q] * (gh * gh + g * g);
  }
  return out;
}

std::vector<double> solution_breaks(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s) {
  return psi.panel_breaks(kink_breaks(*s.system, psi.domain().lower(0), psi.domain().upper(0)));
}

}  // namespace

TestFunctionalA1::TestFunctionalA1(geometry::PointSet nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (weights_.size() != nodes_.size()) throw Error(ErrorCode::DimensionMismatch, "one weight per node");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw Error(ErrorCode::NonFinite, "non-finite weight");
  }
}

TestFunctionalA1 TestFunctionalA1::interval_indicator(double a, double b) {
  if (!(a < b)) throw Error(ErrorCode::InvalidInput, "indicator needs a < b");
  return TestFunctionalA1(geometry::PointSet::from_scalars({a, b}), {-1.0, 1.0});
}

double TestFunctionalA1::a1_seminorm() const {
  double acc = 0.0;
  for (double w : weights_) acc += std::abs(w);
  return acc;
}

TestFunctionalAdjoint::TestFunctionalAdjoint(double a, double b, double eps, geometry::Domain dom)
    : a_(a), b_(b), eps_(eps), c_psi_(std::sqrt(2.0 / eps)), domain_(std::move(dom)),
      breaks_{a - eps, a, b, b + eps} {}

TestFunctionalAdjoint TestFunctionalAdjoint::smoothed_indicator(double a, double b, double eps,
                                                                const geometry::Domain& dom) {
  if (dom.dim() != 1) throw Error(ErrorCode::InvalidInput, "smoothed indicator is one-dimensional");
  if (!(eps > 0.0) || !(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidInput, "smoothed indicator needs eps > 0 and a < b");
  }
  if (a - eps < dom.lower(0) || b + eps > dom.upper(0)) {
    throw Error(ErrorCode::DomainViolation, "smoothed indicator support leaves the domain");
  }
  return TestFunctionalAdjoint(a, b, eps, dom);
}

double TestFunctionalAdjoint::psi0(double x) const {
  if (x >= a_ - eps_ && x < a_) return -1.0 / eps_;
  if (x >= b_ && x < b_ + eps_) return 1.0 / eps_;
  return 0.0;
}

std::vector<double> TestFunctionalAdjoint::panel_breaks(std::span<const double> extra) const {
  std::vector<double> all(breaks_.begin(), breaks_.end());
  all.insert(all.end(), extra.begin(), extra.end());
  return quadrature::uniform_breaks(domain_.lower(0), domain_.upper(0), kPanels, all);
}

double pair_a1(const TestFunctionalA1& psi, const regularization::SpectralSolution& s, const Function& g_true) {
  const auto& z = psi.nodes();
  if (z.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "functional nodes are one-dimensional");
  double acc = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double x = z.point(j)[0];
    acc += psi.weights()[j] * (regularization::evaluate_g(s, x) - g_true(x));
  }
  return acc;
}

double pair_adjoint(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s,
                    const Function& g_true) {
  const auto breaks = solution_breaks(psi, s);
  const auto coarse = integrate_error(psi, s, g_true, quadrature::composite(breaks, TestFunctionalAdjoint::kOrder));
  const auto fine = integrate_error(
      psi, s, g_true, quadrature::composite(quadrature::refine(breaks), TestFunctionalAdjoint::kOrder));
  const double tol = kResolutionTol * psi.c_psi() * std::sqrt(fine.err_sq) +
                     kFloor * psi.c_psi() * std::sqrt(fine.ref_sq);
  if (std::abs(coarse.pairing - fine.pairing) > tol) {
    throw Error(ErrorCode::QuadratureUnderResolved, "weak-error quadrature is under-resolved");
  }
  return coarse.pairing;
}

double quadrature_l2_error(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s,
                           const Function& g_true) {
  const auto rule = quadrature::composite(solution_breaks(psi, s), TestFunctionalAdjoint::kOrder);
  return std::sqrt(integrate_error(psi, s, g_true, rule).err_sq);
}

double LinearPairing::operator()(const linalg::Vector& a) const {
  if (static_cast<std::size_t>(a.size()) != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient length differs from pairing weights");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[static_cast<Eigen::Index>(i)];
  return acc - target;
}

LinearPairing precompute_a1(const TestFunctionalA1& psi, const regularization::GramSystem& sys,
                            const Function& g_true) {
  const auto& k = sys.kernel();
  const auto& x = sys.nodes();
  LinearPairing out;
  out.w.assign(x.size(), 0.0);
  for (std::size_t j = 0; j < psi.nodes().size(); ++j) {
    const auto z = psi.nodes().point(j);
    const double alpha = psi.weights()[j];
    for (std::size_t i = 0; i < x.size(); ++i) out.w[i] += alpha * k.eval(z, x.point(i));
    out.target += alpha * g_true(z[0]);
  }
  return out;
}

namespace {

// Weighted psi0 values on the part of a rule where psi0 is non-zero.
struct SupportRule {
  std::vector<double> nodes;
  std::vector<double> weights;    // quadrature weights
  std::vector<double> psi_wts;    // quadrature weight * psi0
};

SupportRule support_rule(const TestFunctionalAdjoint& psi, const quadrature::Rule& rule) {
  SupportRule out;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double p = psi.psi0(rule.nodes[q]);
    if (p == 0.0) continue;
    out.nodes.push_back(rule.nodes[q]);
    out.weights.push_back(rule.weights[q]);
    out.psi_wts.push_back(rule.weights[q] * p);
  }
  return out;
}

struct Section {
  double pairing = 0.0;
  double norm_sq = 0.0;
};

template <class F>
Section section(const SupportRule& r, F&& f) {
  Section s;
  for (std::size_t q = 0; q < r.nodes.size(); ++q) {
    const double v = f(r.nodes[q]);
    s.pairing += r.psi_wts[q] * v;
    s.norm_sq += r.weights[q] * v * v;
  }
  return s;
}

}  // namespace

LinearPairing precompute_adjoint(const TestFunctionalAdjoint& psi, const regularization::GramSystem& sys,
                                 const Function& g_true) {
  const auto breaks = psi.panel_breaks(kink_breaks(sys, psi.domain().lower(0), psi.domain().upper(0)));
  const auto coarse = support_rule(psi, quadrature::composite(breaks, TestFunctionalAdjoint::kOrder));
  const auto fine =
      support_rule(psi, quadrature::composite(quadrature::refine(breaks), TestFunctionalAdjoint::kOrder));

  // Each kernel section and g must be resolved on their own; the pairing of any
  // expansion is then resolved relative to sum_i |a_i| ||K(., x_i)||.
  auto check = [&](const Section& c, const Section& f) {
    const double tol = (kResolutionTol + kFloor) * psi.c_psi() * std::sqrt(f.norm_sq) + kFloor;
    if (std::abs(c.pairing - f.pairing) > tol) {
      throw Error(ErrorCode::QuadratureUnderResolved, "weak-error quadrature is under-resolved");
    }
  };

  const auto& k = sys.kernel();
  const auto& x = sys.nodes();
  LinearPairing out;
  out.w.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x.point(i)[0];
    auto ki = [&](double t) { return k.eval(t, xi); };
    const auto c = section(coarse, ki);
    check(c, section(fine, ki));
    out.w[i] = c.pairing;
  }
  const auto c = section(coarse, g_true);
  check(c, section(fine, g_true));
  out.target = c.pairing;
  return out;
}

namespace {

void check_common(const BoundParams& p) {
  if (!(p.tau > p.d / 2.0)) throw Error(ErrorCode::InvalidSmoothness, "bounds need tau > d/2");
  if (!(p.h > 0.0) || !(p.lambda > 0.0) || !(p.n >= 1.0) || !(p.nu >= 0.0) || !(p.d > 0.0) || !(p.C_f >= 0.0) ||
      !(p.E >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "bound parameters out of range");
  }
}

double bias_core(const BoundParams& p) {
  return p.C_f * (std::pow(p.h, p.tau - p.d / 2.0) + std::sqrt(p.lambda));
}

}  // namespace

double bound_adjoint(double c_psi, const BoundParams& p) {
  check_common(p);
  if (!(c_psi >= 0.0)) throw Error(ErrorCode::InvalidInput, "c_psi must be non-negative");
  const double c = std::sqrt(p.consts.c_phi_sq);
  const double variance = p.trace_class
                              ? p.consts.sigma_max * (p.nu / p.n) * (p.E / p.lambda) * p.consts.trace_bound
                              : p.consts.sigma_max * c * (p.nu / std::sqrt(p.n)) * (p.E / p.lambda);
  return c_psi * (std::pow(p.h, p.d / 2.0) * bias_core(p) + variance);
}

double bound_a1(double a1_seminorm, const BoundParams& p) {
  check_common(p);
  if (!(a1_seminorm >= 0.0)) throw Error(ErrorCode::InvalidInput, "seminorm must be non-negative");
  const double c = std::sqrt(p.consts.c_phi_sq);
  const double variance = p.trace_class ? c * (p.nu / p.n) * (p.E / p.lambda) * p.consts.trace_bound
                                        : p.consts.c_phi_sq * (p.nu / std::sqrt(p.n)) * (p.E / p.lambda);
  return a1_seminorm * (bias_core(p) + variance);
}

double optimal_lambda(FunctionalClass cls, bool trace_class, double n, double nu, double h, double d) {
  if (!(n >= 1.0) || !(nu > 0.0) || !(h > 0.0) || !(d > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "optimal lambda needs n >= 1, nu > 0, h > 0");
  }
  const double base = trace_class ? std::pow(nu / n, 2.0 / 3.0) : std::cbrt(nu * nu / n);
  return cls == FunctionalClass::adjoint ? base * std::pow(h, -d / 3.0) : base;
}

Rate theoretical_rate(FunctionalClass cls, bool trace_class, double tau, double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidInput, "dimension must be positive");
  const double ratio = tau / d;
  if (cls == FunctionalClass::adjoint) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidSmoothness, "smoothness must be positive");
    return trace_class ? Rate{std::min(ratio, 2.0 / 3.0), 1.0 / 3.0} : Rate{std::min(ratio, 0.5), 0.0};
  }
  if (!(tau > d / 2.0)) throw Error(ErrorCode::InvalidSmoothness, "a1 rates need tau > d/2");
  return trace_class ? Rate{std::min(ratio - 0.5, 1.0 / 3.0), 2.0 / 3.0}
                     : Rate{std::min(ratio - 0.5, 1.0 / 6.0), 1.0 / 3.0};
}

FunctionalClass parse_class(const std::string& s) {
  if (s == "adjoint") return FunctionalClass::adjoint;
  if (s == "a1") return FunctionalClass::a1;
  throw Error(ErrorCode::ConfigInvalid, "unknown functional class '" + s + "'");
}

double Functional::size() const { return cls == FunctionalClass::a1 ? a1->a1_seminorm() : adjoint->c_psi(); }

nlohmann::json Functional::to_json() const {
  if (cls == FunctionalClass::a1) {
    return {{"class", "a1"},
            {"nodes", std::vector<double>(a1->nodes().coords().begin(), a1->nodes().coords().end())},
            {"weights", a1->weights()}};
  }
  return {{"class", "adjoint"},
          {"psi0", "smoothed-indicator"},
          {"a", adjoint->a()},
          {"b", adjoint->b()},
          {"eps", adjoint->eps()}};
}

Functional functional_from_json(const nlohmann::json& spec, const geometry::Domain& dom) {
  try {
    const auto cls = parse_class(spec.at("class").get<std::string>());
    if (cls == FunctionalClass::a1) {
      auto nodes = spec.at("nodes").get<std::vector<double>>();
      auto weights = spec.at("weights").get<std::vector<double>>();
      for (double z : nodes) {
        if (!dom.contains(std::span(&z, 1))) throw Error(ErrorCode::ConfigInvalid, "functional node outside domain");
      }
      return {cls, TestFunctionalA1(geometry::PointSet::from_scalars(std::move(nodes)), std::move(weights)), {}};
    }
    const auto kind = spec.value("psi0", std::string("smoothed-indicator"));
    if (kind != "smoothed-indicator") throw Error(ErrorCode::ConfigInvalid, "unknown psi0 '" + kind + "'");
    return {cls, {},
            TestFunctionalAdjoint::smoothed_indicator(spec.at("a").get<double>(), spec.at("b").get<double>(),
                                                      spec.at("eps").get<double>(), dom)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("functional spec: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

}  // namespace specreg::weak_error
