#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specreg/geometry.hpp"
#include "specreg/kernels.hpp"

namespace specreg::operators {

using Function = std::function<double(double)>;

enum class OperatorKind { integration, gaussian_convolution };

/// Exact pair (f, g = Af).  hk_norm is ||g||_{H_K} when known in closed form.
struct SourcePair {
  std::string name;
  Function f;
  Function g;
  std::optional<double> hk_norm;
};

struct OperatorConstants {
  double sigma_max;    // largest singular value of A
  double c_phi_sq;     // sup_x ||phi_x||^2
  double trace_bound;  // C'' = (1/n) sum_i K(x_i, x_i), trace of A_n^* A_n
};

/// Forward operator (Af)(x) = <f, phi_x> on a one-dimensional domain.
class ForwardProblem {
 public:
  /// (Af)(x) = int_0^x f(t) dt on [0, 1]; Brownian kernel min(x, x').
  static ForwardProblem integration();
  /// (Af)(x) = int exp(-(x - t)^2) f(t) dt; kernel sqrt(pi/2) exp(-(x - x')^2 / 2).
  static ForwardProblem gaussian_convolution(const geometry::Domain& dom = geometry::Domain::interval(-3.0, 3.0));

  OperatorKind kind() const { return kind_; }
  std::string name() const;
  const geometry::Domain& domain() const { return domain_; }
  /// Closed-form induced kernel.
  const kernels::KernelModel& kernel() const { return kernel_; }
  /// Same kernel evaluated as <phi_x, phi_x'> by quadrature.
  kernels::KernelModel induced_kernel(std::size_t order = 64) const;
  const std::shared_ptr<const kernels::FeatureMap>& feature_map() const { return map_; }

  double sigma_max() const { return sigma_max_; }
  double c_phi_sq() const { return c_phi_sq_; }
  /// ||phi_x||^2 in H_1.
  double feature_norm_sq(double x) const;
  /// (Af)(x) by composite Gauss-Legendre quadrature of <f, phi_x>.
  double apply(const Function& f, double x) const;

 private:
  ForwardProblem(OperatorKind kind, geometry::Domain dom, kernels::KernelModel k,
                 std::shared_ptr<const kernels::FeatureMap> map, double sigma_max, double c_phi_sq)
      : kind_(kind), domain_(std::move(dom)), kernel_(std::move(k)), map_(std::move(map)),
        sigma_max_(sigma_max), c_phi_sq_(c_phi_sq) {}

  OperatorKind kind_;
  geometry::Domain domain_;
  kernels::KernelModel kernel_;
  std::shared_ptr<const kernels::FeatureMap> map_;
  double sigma_max_;
  double c_phi_sq_;
};

/// y_i = g(x_i); throws DomainViolation for points outside the problem domain.
std::vector<double> sample_data(const ForwardProblem& p, const SourcePair& s, const geometry::PointSet& x);

/// j-th singular triple of the integration operator:
/// sigma_j = 1/((j - 1/2) pi), u_j(x) = sqrt2 sin((j - 1/2) pi x), v_j(t) = sqrt2 cos((j - 1/2) pi t).
struct SingularTriple {
  double sigma;
  Function u;
  Function v;
};
SingularTriple analytic_svd_integration(long long j);

std::vector<SourcePair> builtin_source_pairs(const ForwardProblem& p);

OperatorConstants operator_constants(const ForwardProblem& p, const geometry::PointSet& x);

/// {"operator": "integration" | "gaussian-convolution", "domain": [lo, hi]}
ForwardProblem problem_from_json(const nlohmann::json& spec);
/// Index or name into builtin_source_pairs.
SourcePair source_from_json(const ForwardProblem& p, const nlohmann::json& which);
/// Kernel spec; "operator-induced" resolves against `p`.
kernels::KernelModel parse_kernel(const nlohmann::json& spec, const ForwardProblem& p);

}  // namespace specreg::operators
