#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specreg/geometry.hpp"
#include "specreg/operators.hpp"
#include "specreg/quadrature.hpp"
#include "specreg/regularization.hpp"

namespace specreg::weak_error {

using Function = std::function<double(double)>;

/// psi = sum_j alpha_j phi_{z_j}.  Pairs with f as sum_j alpha_j g(z_j).
class TestFunctionalA1 {
 public:
  TestFunctionalA1(geometry::PointSet nodes, std::vector<double> weights);
  /// phi_b - phi_a, the indicator of [a, b] for the integration operator.
  static TestFunctionalA1 interval_indicator(double a, double b);

  const geometry::PointSet& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double a1_seminorm() const;

 private:
  geometry::PointSet nodes_;
  std::vector<double> weights_;
};

/// psi = A^* psi0.  Pairs with f as int psi0 (Af) over the domain.
class TestFunctionalAdjoint {
 public:
  /// psi0 = (1/eps)(-1_[a-eps, a] + 1_[b, b+eps]); ||psi0||_{L2} = sqrt(2/eps).
  static TestFunctionalAdjoint smoothed_indicator(double a, double b, double eps, const geometry::Domain& dom);

  double psi0(double x) const;
  double c_psi() const { return c_psi_; }
  const geometry::Domain& domain() const { return domain_; }
  /// Points where psi0 jumps.
  const std::vector<double>& breakpoints() const { return breaks_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double eps() const { return eps_; }

  static constexpr std::size_t kPanels = 20;
  static constexpr std::size_t kOrder = 8;

  /// Composite Gauss-Legendre breakpoints over the domain: kPanels uniform panels,
  /// split at psi0's jumps and at any `extra` points.
  std::vector<double> panel_breaks(std::span<const double> extra = {}) const;

 private:
  TestFunctionalAdjoint(double a, double b, double eps, geometry::Domain dom);

  double a_;
  double b_;
  double eps_;
  double c_psi_;
  geometry::Domain domain_;
  std::vector<double> breaks_;
};

/// sum_j alpha_j (g_hat - g)(z_j), exact.
double pair_a1(const TestFunctionalA1& psi, const regularization::SpectralSolution& s, const Function& g_true);

/// int psi0 (g_hat - g) by composite Gauss-Legendre; panels are also split at the
/// nodes for kernels with kinks.  Throws QuadratureUnderResolved when halving the
/// panels moves the result by more than 1e-6 c_psi ||g_hat - g||_{L2}.
double pair_adjoint(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s,
                    const Function& g_true);

/// Quadrature L2 norm of (g_hat - g) on the same rule pair_adjoint uses.
double quadrature_l2_error(const TestFunctionalAdjoint& psi, const regularization::SpectralSolution& s,
                           const Function& g_true);

/// Pairing reduced to coefficient space for a fixed Gram system:
/// <psi, f_hat - f> = w . a - target.
struct LinearPairing {
  std::vector<double> w;
  double target = 0.0;
  double operator()(const linalg::Vector& a) const;
};

LinearPairing precompute_a1(const TestFunctionalA1& psi, const regularization::GramSystem& sys,
                            const Function& g_true);
/// Also checks every kernel section K(., x_i) and g for quadrature resolution.
LinearPairing precompute_adjoint(const TestFunctionalAdjoint& psi, const regularization::GramSystem& sys,
                                 const Function& g_true);

struct BoundParams {
  double C_f = 1.0;
  double h = 0.0;
  double tau = 1.0;
  double d = 1.0;
  double lambda = 0.0;
  double nu = 0.0;
  double n = 1.0;
  operators::OperatorConstants consts{};
  double E = 1.0;
  bool trace_class = false;
};

/// C_psi (C_f h^{d/2} (h^{tau-d/2} + sqrt(lambda)) + variance), variance
/// sigma_max c (nu/sqrt n)(E/lambda), or sigma_max (nu/n)(E/lambda) C'' when trace class.
/// c = sqrt(c_phi_sq).
double bound_adjoint(double c_psi, const BoundParams& p);

/// ||alpha||_1 (C_f (h^{tau-d/2} + sqrt(lambda)) + variance), variance
/// c^2 (nu/sqrt n)(E/lambda), or c (nu/n)(E/lambda) C'' when trace class.
double bound_a1(double a1_seminorm, const BoundParams& p);

enum class FunctionalClass { adjoint, a1 };

/// Bound-minimizing lambda with unit proportionality constant.
double optimal_lambda(FunctionalClass cls, bool trace_class, double n, double nu, double h, double d);

struct Rate {
  double error_exponent;   // error = O(n^-error_exponent)
  double lambda_exponent;  // lambda = O(n^-lambda_exponent)
};
Rate theoretical_rate(FunctionalClass cls, bool trace_class, double tau, double d);

FunctionalClass parse_class(const std::string& s);

/// {"class": "a1", "nodes": [...], "weights": [...]} or
/// {"class": "adjoint", "psi0": "smoothed-indicator", "a": .., "b": .., "eps": ..}
struct Functional {
  FunctionalClass cls;
  std::optional<TestFunctionalA1> a1;
  std::optional<TestFunctionalAdjoint> adjoint;

  /// ||alpha||_1 or c_psi.
  double size() const;
  nlohmann::json to_json() const;
};
Functional functional_from_json(const nlohmann::json& spec, const geometry::Domain& dom);

}  // namespace specreg::weak_error
