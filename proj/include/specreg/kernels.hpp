#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "specreg/geometry.hpp"
#include "specreg/linalg.hpp"

namespace specreg::kernels {

enum class Family { brownian, gaussian_autocorrelation, imq, operator_induced };

std::string_view name(Family f) noexcept;

/// Feature map x -> phi_x of a one-dimensional forward operator, used to
/// build operator-induced kernels K(x, x') = <phi_x, phi_x'> by quadrature.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual std::string name() const = 0;
  /// phi_x(t)
  virtual double value(double x, double t) const = 0;
  /// Interval outside which phi_x vanishes (or is negligible).
  virtual std::pair<double, double> support(double x) const = 0;
  /// Points inside the support where phi_x is not smooth.
  virtual std::vector<double> kinks(double /*x*/) const { return {}; }
  /// Sobolev order of the induced native space.
  virtual double smoothness() const = 0;
  /// Valid evaluation points x.
  virtual geometry::Domain domain() const = 0;
};

/// Positive-definite kernel with smoothness metadata (tau, d).
class KernelModel {
 public:
  static KernelModel brownian();
  static KernelModel gaussian_autocorrelation(double scale = 1.0, std::size_t dim = 1);
  static KernelModel imq(double shape = 1.0, std::size_t dim = 1);
  static KernelModel operator_induced(std::shared_ptr<const FeatureMap> map, std::size_t order = 64);

  Family family() const { return family_; }
  /// tau; +infinity for analytic kernels.
  double smoothness() const { return tau_; }
  std::size_t dim() const { return dim_; }
  double parameter() const { return param_; }
  const FeatureMap* feature_map() const { return map_.get(); }
  /// Kernel sections K(., x_i) have derivative jumps at x_i (Brownian).
  bool has_kinks() const { return family_ == Family::brownian; }

  /// Throws DomainViolation when x is outside the kernel's domain.
  void check_point(std::span<const double> x) const;
  double eval(std::span<const double> x, std::span<const double> y) const;
  double eval(double x, double y) const { return eval(std::span(&x, 1), std::span(&y, 1)); }

  nlohmann::json to_json() const;
  std::string describe() const;

 private:
  KernelModel(Family f, double tau, std::size_t dim, double param)
      : family_(f), tau_(tau), dim_(dim), param_(param) {}

  Family family_;
  double tau_;
  std::size_t dim_;
  double param_;
  std::size_t order_ = 64;
  std::shared_ptr<const FeatureMap> map_;
};

/// Closed-form families from {"family": ..., "params": {...}}.
/// operator-induced kernels need a forward problem; see operators::parse_kernel.
KernelModel from_json(const nlohmann::json& spec);

/// K_ij = K(x_i, x_j).
linalg::Matrix gram(const KernelModel& k, const geometry::PointSet& x);

/// Row i holds K(y_i, x_j) for evaluation points y.
linalg::Matrix cross_gram(const KernelModel& k, const geometry::PointSet& y,
                          const geometry::PointSet& x);

/// sum_i c_i K(z, x_i).
double expand(const KernelModel& k, const geometry::PointSet& x, std::span<const double> coeffs,
              std::span<const double> z);

/// sqrt(c^T K c) with tiny negative round-off clamped to zero.
double rkhs_norm_expansion(const KernelModel& k, const geometry::PointSet& x,
                           std::span<const double> coeffs);

}  // namespace specreg::kernels
