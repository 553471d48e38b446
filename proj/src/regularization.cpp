#include "specreg/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "specreg/error.hpp"
#include "specreg/rng.hpp"

namespace specreg::regularization {

GramSystem::GramSystem(kernels::KernelModel k, geometry::PointSet x, Scaling scaling)
    : kernel_(std::move(k)), nodes_(std::move(x)), scaling_(scaling), gram_(kernels::gram(kernel_, nodes_)) {
  if (scaling_ == Scaling::normalized) {
    eig_ = linalg::sym_eig(gram_ / static_cast<double>(nodes_.size()));
  } else {
    eig_ = linalg::sym_eig(gram_);
  }
}

linalg::Vector filtered_spectrum(const GramSystem& sys, const filters::FilterFunction& f, double lambda) {
  const auto& mu = sys.eig().eigenvalues;
  linalg::Vector s(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) s[i] = f.s(lambda, std::max(mu[i], 0.0));
  return s;
}

SpectralSolution solve(std::shared_ptr<const GramSystem> system, std::span<const double> y,
                       const filters::FilterFunction& f, double lambda) {
  if (!system) throw Error(ErrorCode::InvalidInput, "missing Gram system");
  if (y.size() != system->size()) throw Error(ErrorCode::DimensionMismatch, "data length differs from node count");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  const Eigen::Map<const linalg::Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const auto& v = system->eig().eigenvectors;
  linalg::Vector coeff = v.transpose() * yv;
  coeff.array() *= filtered_spectrum(*system, f, lambda).array();
  linalg::Vector a = v * coeff;
  if (system->scaling() == Scaling::normalized) a /= static_cast<double>(system->size());
  return {std::move(system), std::move(a), lambda, f};
}

SpectralSolution solve(const kernels::KernelModel& k, const geometry::PointSet& x, std::span<const double> y,
                       const filters::FilterFunction& f, double lambda, Scaling scaling) {
  if (y.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "data length differs from node count");
  return solve(GramSystem::build(k, x, scaling), y, f, lambda);
}

double evaluate_g(const SpectralSolution& s, std::span<const double> z) {
  return kernels::expand(s.system->kernel(), s.nodes(), std::span(s.a.data(), static_cast<std::size_t>(s.a.size())),
                         z);
}

double evaluate_g(const SpectralSolution& s, double z) { return evaluate_g(s, std::span(&z, 1)); }

std::vector<double> evaluate_g(const SpectralSolution& s, const geometry::PointSet& z) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = evaluate_g(s, z.point(i));
  return out;
}

linalg::Vector at_nodes(const SpectralSolution& s) { return s.system->gram() * s.a; }

std::vector<double> add_noise(std::span<const double> y, const NoiseModel& nm) {
  if (!(nm.nu >= 0.0)) throw Error(ErrorCode::InvalidInput, "noise level must be non-negative");
  std::vector<double> out(y.begin(), y.end());
  if (nm.nu == 0.0) return out;
  Rng rng(nm.seed);
  for (auto& v : out) v += nm.nu * rng.normal();
  return out;
}

double discrete_residual_norm(const SpectralSolution& s, std::span<const double> y) {
  if (y.size() != s.system->size()) throw Error(ErrorCode::DimensionMismatch, "data length differs from node count");
  const Eigen::Map<const linalg::Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  return (yv - at_nodes(s)).norm();
}

double hk_norm(const SpectralSolution& s) { return std::sqrt(std::max(s.a.dot(at_nodes(s)), 0.0)); }

void write_solution_csv(const SpectralSolution& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const auto& x = s.nodes();
  for (std::size_t k = 0; k < x.dim(); ++k) out << "x_" << (k + 1) << ',';
  out << "coefficient\n" << std::setprecision(17);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double c : x.point(i)) out << c << ',';
    out << s.a[static_cast<Eigen::Index>(i)] << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

nlohmann::json solution_metadata(const SpectralSolution& s, std::uint64_t seed) {
  return {{"lambda", s.lambda},
          {"filter", s.filter.to_json()},
          {"kernel", s.system->kernel().to_json()},
          {"n", s.system->size()},
          {"scaling", s.system->scaling() == Scaling::normalized ? "normalized" : "gram"},
          {"seed", seed}};
}

}  // namespace specreg::regularization
