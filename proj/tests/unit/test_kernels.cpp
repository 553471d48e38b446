#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "specreg/kernels.hpp"
#include "specreg/linalg.hpp"
#include "specreg/operators.hpp"
#include "test_util.hpp"

using namespace specreg;
using geometry::PointSet;
using kernels::KernelModel;

TEST_CASE("kernel evaluation examples") {
  const auto b = KernelModel::brownian();
  CHECK(b.eval(0.3, 0.7) == 0.3);
  CHECK(b.eval(0.0, 0.8) == 0.0);
  CHECK(b.smoothness() == 1.0);
  CHECK(b.dim() == 1);
  const auto g = KernelModel::gaussian_autocorrelation();
  CHECK(g.eval(0.4, 0.4) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-15));
  CHECK(std::isinf(g.smoothness()));
  CHECK(KernelModel::imq().eval(0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_ERROR_CODE(b.eval(1.2, 0.5), ErrorCode::DomainViolation);
  CHECK_ERROR_CODE(b.eval(-0.1, 0.5), ErrorCode::DomainViolation);
}

TEST_CASE("Gram matrix examples") {
  const auto b = KernelModel::brownian();
  const auto m = kernels::gram(b, PointSet::from_scalars({0.25, 0.75}));
  CHECK(m(0, 0) == 0.25);
  CHECK(m(0, 1) == 0.25);
  CHECK(m(1, 0) == 0.25);
  CHECK(m(1, 1) == 0.75);
  CHECK(kernels::gram(b, PointSet::from_scalars({0.5}))(0, 0) == 0.5);

  const auto x = geometry::generate_points(geometry::Scheme::halton, 30, geometry::Domain::interval(-3, 3), 0);
  const auto g = kernels::gram(KernelModel::gaussian_autocorrelation(), x);
  const auto e = linalg::sym_eig(g);
  CHECK(e.eigenvalues.minCoeff() >= -1e-8 * g.trace());
  CHECK_ERROR_CODE(kernels::gram(b, PointSet::from_scalars({0.5, 2.0})), ErrorCode::DomainViolation);
}

TEST_CASE("Gram assembly agrees with eval entrywise, is symmetric and PSD") {
  std::mt19937_64 eng(4);
  std::vector<KernelModel> ks{KernelModel::brownian(), KernelModel::gaussian_autocorrelation(),
                              KernelModel::imq(1.0), KernelModel::imq(2.0)};
  for (const auto& k : ks) {
    const auto xs = oracle::random_points(eng, 40, 0.0, 1.0);
    const auto x = PointSet::from_scalars(xs);
    const auto m = kernels::gram(k, x);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 40; ++j) {
        CHECK(m(i, j) == k.eval(xs[i], xs[j]));
        CHECK(k.eval(xs[i], xs[j]) == k.eval(xs[j], xs[i]));
      }
    }
    CHECK(linalg::sym_eig(m).eigenvalues.minCoeff() >= -1e-8 * m.trace());
  }
  const auto xs = oracle::random_points(eng, 25, 0.0, 1.0);
  CHECK(kernels::gram(KernelModel::brownian(), PointSet::from_scalars(xs)) == oracle::brownian_gram(xs));
}

TEST_CASE("Gaussian kernels in two dimensions are tensor products") {
  const auto k = KernelModel::gaussian_autocorrelation(1.0, 2);
  const double a[] = {0.0, 0.0}, b[] = {1.0, 1.0};
  CHECK(k.eval(a, b) == doctest::Approx(std::numbers::pi / 2.0 * std::exp(-1.0)));
  const double c[] = {1.0};
  CHECK_ERROR_CODE(k.eval(a, c), ErrorCode::DimensionMismatch);
}

TEST_CASE("cross Gram and expansion") {
  const auto k = KernelModel::brownian();
  const auto x = PointSet::from_scalars({0.2, 0.6, 0.9});
  const auto y = PointSet::from_scalars({0.1, 0.7});
  const auto c = kernels::cross_gram(k, y, x);
  CHECK(c.rows() == 2);
  CHECK(c.cols() == 3);
  CHECK(c(1, 1) == 0.6);
  const std::vector<double> coeffs{1.0, -2.0, 0.5};
  const double z = 0.7;
  CHECK(kernels::expand(k, x, coeffs, std::span(&z, 1)) == doctest::Approx(0.2 - 1.2 + 0.35).epsilon(1e-15));
}

TEST_CASE("RKHS norm of expansions") {
  const auto b = KernelModel::brownian();
  const std::vector<double> one{1.0};
  CHECK(kernels::rkhs_norm_expansion(b, PointSet::from_scalars({1.0}), one) == 1.0);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(kernels::rkhs_norm_expansion(b, PointSet::from_scalars({0.25, 0.75}), zeros) == 0.0);
  const std::vector<double> pm{1.0, -1.0};
  // c^T K c = 0.25 - 2 * 0.25 + 0.75 = 0.5.
  CHECK(kernels::rkhs_norm_expansion(b, PointSet::from_scalars({0.25, 0.75}), pm) == doctest::Approx(std::sqrt(0.5)));
  CHECK_ERROR_CODE(kernels::rkhs_norm_expansion(b, PointSet::from_scalars({0.25, 0.75}), one),
                   ErrorCode::DimensionMismatch);

  std::mt19937_64 eng(10);
  std::normal_distribution<double> g;
  const auto xs = oracle::random_points(eng, 20, 0.0, 1.0);
  const auto x = PointSet::from_scalars(xs);
  for (const auto& k : {b, KernelModel::gaussian_autocorrelation()}) {
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<double> c(20);
      for (auto& v : c) v = g(eng);
      const double r = kernels::rkhs_norm_expansion(k, x, c);
      CHECK(r >= 0.0);
      CHECK(std::isfinite(r));
    }
  }
}

TEST_CASE("truncated singular expansion converges to the Brownian kernel") {
  const int J = 500;
  double worst = 0.0;
  const auto b = KernelModel::brownian();
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double x = i / 49.0, y = j / 49.0;
      double acc = 0.0;
      for (int m = 1; m <= J; ++m) {
        const double w = (m - 0.5) * std::numbers::pi;
        acc += 2.0 * std::sin(w * x) * std::sin(w * y) / (w * w);
      }
      worst = std::max(worst, std::abs(acc - b.eval(x, y)));
    }
  }
  CHECK(worst <= 2e-3);
}

TEST_CASE("operator-induced kernels match the closed forms") {
  const auto integ = operators::ForwardProblem::integration();
  const auto ki = integ.induced_kernel();
  CHECK(ki.family() == kernels::Family::operator_induced);
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (double y : {0.05, 0.5, 0.91}) CHECK(std::abs(ki.eval(x, y) - std::min(x, y)) <= 1e-12);
  }
  const auto gc = operators::ForwardProblem::gaussian_convolution();
  const auto kg = gc.induced_kernel(64);
  for (double x : {-3.0, -1.2, 0.0, 2.5}) {
    for (double y : {-2.0, 0.3, 3.0}) CHECK(std::abs(kg.eval(x, y) - gc.kernel().eval(x, y)) <= 1e-10);
  }
}

TEST_CASE("kernel JSON specs") {
  CHECK(kernels::from_json({{"family", "brownian"}}).family() == kernels::Family::brownian);
  const auto g = kernels::from_json({{"family", "gaussian-autocorrelation"}, {"params", {{"scale", 2.0}}}});
  CHECK(g.parameter() == 2.0);
  const auto i = kernels::from_json({{"family", "imq"}, {"params", {{"shape", 3.0}}}});
  CHECK(i.parameter() == 3.0);
  CHECK(kernels::from_json(i.to_json()).parameter() == 3.0);
  CHECK_ERROR_CODE(kernels::from_json({{"family", "matern"}}), ErrorCode::ConfigInvalid);
  CHECK_ERROR_CODE(kernels::from_json(nlohmann::json::object()), ErrorCode::ConfigInvalid);
  CHECK_ERROR_CODE(kernels::from_json({{"family", "operator-induced"}}), ErrorCode::ConfigInvalid);
  CHECK_ERROR_CODE(KernelModel::gaussian_autocorrelation(-1.0), ErrorCode::InvalidInput);
}
