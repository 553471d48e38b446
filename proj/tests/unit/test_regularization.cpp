#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "specreg/regularization.hpp"
#include "test_util.hpp"

using namespace specreg;
using namespace specreg::regularization;
using filters::FilterFunction;
using geometry::PointSet;
using kernels::KernelModel;

namespace {

Eigen::VectorXd as_vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

std::vector<double> random_normal(std::mt19937_64& eng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> out(n);
  for (auto& v : out) v = g(eng);
  return out;
}

}  // namespace

TEST_CASE("single-node Tikhonov example") {
  const std::vector<double> y{1.0};
  const auto s = solve(KernelModel::brownian(), PointSet::from_scalars({1.0}), y, FilterFunction::tikhonov(), 1.0);
  REQUIRE(s.a.size() == 1);
  CHECK(s.a[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(evaluate_g(s, 1.0) == doctest::Approx(0.5));
  CHECK(hk_norm(s) == doctest::Approx(0.5));
  CHECK(s.lambda == 1.0);
}

TEST_CASE("zero coefficients give the zero function") {
  const std::vector<double> y{0.0, 0.0, 0.0};
  const auto s = solve(KernelModel::brownian(), PointSet::from_scalars({0.2, 0.5, 0.9}), y,
                       FilterFunction::tikhonov(), 0.1);
  CHECK(evaluate_g(s, 0.37) == 0.0);
  CHECK(hk_norm(s) == 0.0);
  const std::vector<double> y2{1.0, 2.0, 2.0};
  CHECK(discrete_residual_norm(s, y2) == doctest::Approx(3.0));
}

TEST_CASE("ridge identity on random instances") {
  std::mt19937_64 eng(100);
  for (int rep = 0; rep < 10; ++rep) {
    const auto xs = oracle::random_points(eng, 100, 0.0, 1.0);
    const auto y = random_normal(eng, 100);
    for (bool brownian : {true, false}) {
      const auto k = brownian ? KernelModel::brownian() : KernelModel::gaussian_autocorrelation();
      const auto K = brownian ? oracle::brownian_gram(xs) : oracle::gaussian_gram(xs);
      for (double lambda : {1e-4, 1e-2, 1.0}) {
        const auto s = solve(k, PointSet::from_scalars(xs), y, FilterFunction::tikhonov(), lambda);
        const auto ref = oracle::ridge(K, as_vec(y), lambda);
        CHECK((s.a - ref).norm() <= 1e-8 * ref.norm());
        const double res_ref = (as_vec(y) - K * ref).norm();
        CHECK(std::abs(discrete_residual_norm(s, y) - res_ref) <= 1e-8 * std::max(res_ref, 1e-12) + 1e-12);
      }
    }
  }
}

TEST_CASE("evaluation at the nodes equals K a") {
  std::mt19937_64 eng(2);
  const auto xs = oracle::random_points(eng, 30, 0.0, 1.0);
  const auto y = random_normal(eng, 30);
  const auto s = solve(KernelModel::brownian(), PointSet::from_scalars(xs), y, FilterFunction::tikhonov(), 1e-3);
  const auto ka = at_nodes(s);
  const auto g = evaluate_g(s, PointSet::from_scalars(xs));
  for (int i = 0; i < 30; ++i) {
    CHECK(std::abs(g[i] - ka[i]) <= 1e-12 * (1.0 + std::abs(ka[i])));
    CHECK(std::abs(evaluate_g(s, xs[i]) - ka[i]) <= 1e-12 * (1.0 + std::abs(ka[i])));
  }
  CHECK_ERROR_CODE(evaluate_g(s, 1.5), ErrorCode::DomainViolation);
}

TEST_CASE("TSVD with tiny lambda interpolates full-rank data") {
  std::mt19937_64 eng(6);
  const auto xs = oracle::random_points(eng, 60, 0.05, 1.0);
  const auto y = random_normal(eng, 60);
  const auto sys = GramSystem::build(KernelModel::brownian(), PointSet::from_scalars(xs));
  const double mu_min = sys->eig().eigenvalues.minCoeff();
  REQUIRE(mu_min > 0.0);
  const auto s = solve(sys, y, FilterFunction::tsvd(), 0.5 * mu_min);
  CHECK(discrete_residual_norm(s, y) <= 1e-8 * as_vec(y).norm());

  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.5 * mu_min}) {
    const double r = discrete_residual_norm(solve(sys, y, FilterFunction::tsvd(), lambda), y);
    CHECK(r <= prev * (1.0 + 1e-12));
    prev = r;
  }
}

TEST_CASE("solve is linear in the data") {
  std::mt19937_64 eng(8);
  const auto xs = oracle::random_points(eng, 40, 0.0, 1.0);
  const auto sys = GramSystem::build(KernelModel::brownian(), PointSet::from_scalars(xs));
  for (const auto& f : {FilterFunction::tikhonov(), FilterFunction::tsvd(), FilterFunction::landweber(1.0)}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto y1 = random_normal(eng, 40), y2 = random_normal(eng, 40);
      std::vector<double> comb(40);
      for (int i = 0; i < 40; ++i) comb[i] = 2.0 * y1[i] - 3.0 * y2[i];
      const double lambda = f.snap_lambda(0.01);
      const auto a1 = solve(sys, y1, f, lambda).a, a2 = solve(sys, y2, f, lambda).a;
      const auto ac = solve(sys, comb, f, lambda).a;
      const Eigen::VectorXd expect = 2.0 * a1 - 3.0 * a2;
      CHECK((ac - expect).norm() <= 1e-10 * std::max(expect.norm(), 1e-300));
    }
  }
}

TEST_CASE("noise model") {
  const std::vector<double> y{1.0, -2.0, 3.5};
  CHECK(add_noise(y, {0.0, 9}) == y);
  CHECK(add_noise(y, {0.3, 9}) == add_noise(y, {0.3, 9}));
  CHECK(add_noise(y, {0.3, 9}) != add_noise(y, {0.3, 10}));
  CHECK_ERROR_CODE(add_noise(y, {-1.0, 0}), ErrorCode::InvalidInput);

  const std::vector<double> zeros(100000, 0.0);
  const auto d = add_noise(zeros, {1.0, 42});
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= d.size();
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= d.size() - 1;
  CHECK(std::abs(mean) <= 0.02);
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("RKHS norm decreases as lambda grows") {
  std::mt19937_64 eng(12);
  const auto xs = oracle::random_points(eng, 50, 0.0, 1.0);
  const auto y = random_normal(eng, 50);
  const auto sys = GramSystem::build(KernelModel::brownian(), PointSet::from_scalars(xs));
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : filters::log_grid(1e-6, 1e4, 40)) {
    const double h = hk_norm(solve(sys, y, FilterFunction::tikhonov(), lambda));
    CHECK(h <= prev);
    prev = h;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("discrete sampling lemma bounds on representable data") {
  std::mt19937_64 eng(31);
  const auto ls = filters::log_grid(1e-6, 10.0, 25);
  const auto ts = filters::log_grid(1e-10, 100.0, 2000);
  const std::vector<double> half{0.5};
  for (int rep = 0; rep < 20; ++rep) {
    const auto xs = oracle::random_points(eng, 30, 0.0, 1.0);
    const auto k = rep % 2 ? KernelModel::brownian() : KernelModel::gaussian_autocorrelation();
    const auto sys = GramSystem::build(k, PointSet::from_scalars(xs), Scaling::gram);
    const auto c = as_vec(random_normal(eng, 30));
    const Eigen::VectorXd yv = sys->gram() * c;
    const std::vector<double> y(yv.data(), yv.data() + yv.size());
    const double gnorm = std::sqrt(std::max(c.dot(yv), 0.0));
    for (const auto& f : {FilterFunction::tikhonov(), FilterFunction::tsvd()}) {
      const auto cert = filters::certify_constants(f, ls, ts, half);
      for (double lambda : ls) {
        const auto s = solve(sys, y, f, lambda);
        CHECK(discrete_residual_norm(s, y) <= cert.C_of(0.5) * std::sqrt(lambda) * gnorm * (1.0 + 1e-6) + 1e-12);
        CHECK(hk_norm(s) <= cert.D.value * gnorm * (1.0 + 1e-6) + 1e-12);
      }
    }
  }
}

TEST_CASE("solver error paths") {
  const auto x = PointSet::from_scalars({0.2, 0.6});
  const std::vector<double> short_y{1.0};
  const std::vector<double> y{1.0, 2.0};
  CHECK_ERROR_CODE(solve(KernelModel::brownian(), x, short_y, FilterFunction::tikhonov(), 0.1),
                   ErrorCode::DimensionMismatch);
  CHECK_ERROR_CODE(solve(KernelModel::brownian(), x, y, FilterFunction::tikhonov(), 0.0), ErrorCode::InvalidLambda);
  CHECK_ERROR_CODE(solve(KernelModel::brownian(), PointSet::from_scalars({0.2, 1.6}), y, FilterFunction::tikhonov(), 0.1),
                   ErrorCode::DomainViolation);
}

TEST_CASE("solution dump") {
  const std::vector<double> y{1.0, 2.0};
  const auto s = solve(KernelModel::brownian(), PointSet::from_scalars({0.2, 0.6}), y, FilterFunction::tikhonov(), 0.1);
  const auto path = std::filesystem::temp_directory_path() / "specreg_solution_test.csv";
  write_solution_csv(s, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x_1,coefficient");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 2);
  std::filesystem::remove(path);
  const auto meta = solution_metadata(s, 5);
  CHECK(meta["lambda"] == 0.1);
  CHECK(meta["seed"] == 5);
}
