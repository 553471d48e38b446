#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace specreg::filters {

enum class Kind { tikhonov, tsvd, landweber };

/// Spectral filter s_lambda(t) with residual r_lambda(t) = 1 - t s_lambda(t).
///
/// Landweber uses m = 1/lambda iterations, so lambda must be the reciprocal of
/// a positive integer; snap_lambda maps an arbitrary lambda onto that ladder.
class FilterFunction {
 public:
  static FilterFunction tikhonov() { return FilterFunction(Kind::tikhonov, 0.0); }
  static FilterFunction tsvd() { return FilterFunction(Kind::tsvd, 0.0); }
  /// Throws InvalidInput unless gamma > 0.
  static FilterFunction landweber(double gamma);

  Kind kind() const { return kind_; }
  std::string name() const;
  double gamma() const { return gamma_; }
  /// +infinity for tsvd and landweber.
  double qualification() const;

  /// Nearest admissible lambda (1/round(1/lambda) for landweber, identity otherwise).
  double snap_lambda(double lambda) const;
  /// Landweber iteration count for lambda; throws InvalidLambda when 1/lambda is not an integer.
  std::int64_t iterations(double lambda) const;

  double s(double lambda, double t) const;
  double residual(double lambda, double t) const { return 1.0 - t * s(lambda, t); }

  nlohmann::json to_json() const;

 private:
  FilterFunction(Kind k, double gamma) : kind_(k), gamma_(gamma) {}
  void check(double lambda, double t) const;

  Kind kind_;
  double gamma_;
};

/// {"kind": "tikhonov" | "tsvd" | "landweber", "gamma": ...}
FilterFunction filter_from_json(const nlohmann::json& spec);

struct ArgMax {
  double value = 0.0;
  double lambda = 0.0;
  double t = 0.0;
};

/// Grid maxima of the filter constants.  Only witnesses the grid it was built on.
struct Certificate {
  std::string filter;
  std::vector<double> lambda_grid;
  std::vector<double> t_grid;
  std::vector<double> a_list;
  ArgMax D;               // max |t s_lambda(t)|
  ArgMax E;               // max |lambda s_lambda(t)|
  std::vector<ArgMax> C;  // max |t^a r_lambda(t)| / lambda^a, one per a

  double C_of(double a) const;
  nlohmann::json to_json() const;
};

/// For tsvd the t-grid is augmented with t = lambda and the double just below it
/// for every grid lambda inside the t-range, so the cutoff suprema are attained.
Certificate certify_constants(const FilterFunction& f, std::span<const double> lambda_grid,
                              std::span<const double> t_grid, std::span<const double> a_list);

/// count log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace specreg::filters
