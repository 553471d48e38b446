#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "specreg/filters.hpp"
#include "specreg/geometry.hpp"
#include "specreg/kernels.hpp"
#include "specreg/linalg.hpp"

namespace specreg::regularization {

/// normalized: operator matrix G = K/n and a = (1/n) s_lambda(G) y, so Tikhonov
/// solves (K + n lambda I) a = y.  gram: a = s_lambda(K) y on the raw Gram matrix.
enum class Scaling { normalized, gram };

/// Gram matrix and eigensystem for a fixed (kernel, nodes); immutable and shareable
/// across lambdas, filters and noise draws.
class GramSystem {
 public:
  GramSystem(kernels::KernelModel k, geometry::PointSet x, Scaling scaling = Scaling::normalized);
  static std::shared_ptr<const GramSystem> build(kernels::KernelModel k, geometry::PointSet x,
                                                 Scaling scaling = Scaling::normalized) {
    return std::make_shared<const GramSystem>(std::move(k), std::move(x), scaling);
  }

  const kernels::KernelModel& kernel() const { return kernel_; }
  const geometry::PointSet& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  Scaling scaling() const { return scaling_; }
  /// Raw Gram matrix K_ij = K(x_i, x_j).
  const linalg::Matrix& gram() const { return gram_; }
  /// Eigensystem of the operator matrix (K/n or K).
  const linalg::SymEig& eig() const { return eig_; }

 private:
  kernels::KernelModel kernel_;
  geometry::PointSet nodes_;
  Scaling scaling_;
  linalg::Matrix gram_;
  linalg::SymEig eig_;
};

struct SpectralSolution {
  std::shared_ptr<const GramSystem> system;
  linalg::Vector a;
  double lambda;
  filters::FilterFunction filter;

  const geometry::PointSet& nodes() const { return system->nodes(); }
};

SpectralSolution solve(std::shared_ptr<const GramSystem> system, std::span<const double> y,
                       const filters::FilterFunction& f, double lambda);
SpectralSolution solve(const kernels::KernelModel& k, const geometry::PointSet& x, std::span<const double> y,
                       const filters::FilterFunction& f, double lambda, Scaling scaling = Scaling::normalized);

/// Filtered spectrum s_lambda(mu_i) of the operator matrix, clamping round-off negatives to 0.
linalg::Vector filtered_spectrum(const GramSystem& sys, const filters::FilterFunction& f, double lambda);

/// g_hat(z) = sum_i a_i K(z, x_i).
double evaluate_g(const SpectralSolution& s, std::span<const double> z);
double evaluate_g(const SpectralSolution& s, double z);
std::vector<double> evaluate_g(const SpectralSolution& s, const geometry::PointSet& z);
/// K a.
linalg::Vector at_nodes(const SpectralSolution& s);

struct NoiseModel {
  double nu = 0.0;
  std::uint64_t seed = 0;
};

/// y + delta with delta_i ~ N(0, nu^2) drawn from Rng(seed).
std::vector<double> add_noise(std::span<const double> y, const NoiseModel& nm);

/// ||y - K a||_2 (unnormalized).
double discrete_residual_norm(const SpectralSolution& s, std::span<const double> y);
/// sqrt(a^T K a).
double hk_norm(const SpectralSolution& s);

/// Columns x_1..x_d, coefficient.
void write_solution_csv(const SpectralSolution& s, const std::filesystem::path& path);
nlohmann::json solution_metadata(const SpectralSolution& s, std::uint64_t seed);

}  // namespace specreg::regularization
