#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "specreg/geometry.hpp"
#include "test_util.hpp"

using namespace specreg;
using namespace specreg::geometry;

namespace {

std::vector<double> to_vec(const PointSet& x) { return {x.coords().begin(), x.coords().end()}; }

PointSet random_set(std::mt19937_64& eng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * d);
  for (auto& v : c) v = u(eng);
  return PointSet(d, std::move(c));
}

}  // namespace

TEST_CASE("separation distance examples") {
  CHECK(separation_distance(PointSet::from_scalars({0.0, 0.5, 1.0})) == doctest::Approx(0.25).epsilon(1e-15));
  for (int n : {3, 11, 40}) {
    const auto x = generate_points(Scheme::uniform_grid, n, Domain::interval(0, 1), 0);
    CHECK(separation_distance(x) == doctest::Approx(1.0 / (2.0 * (n - 1))).epsilon(1e-12));
  }
  std::mt19937_64 eng(3);
  const auto x = random_set(eng, 50, 2);
  CHECK(separation_distance(x) == oracle::separation(to_vec(x), 2));
  CHECK_ERROR_CODE(separation_distance(PointSet::from_scalars({0.3})), ErrorCode::TooFewPoints);
}

TEST_CASE("fill distance examples") {
  const auto unit = Domain::interval(0, 1);
  auto f = fill_distance(PointSet::from_scalars({0.5}), unit, 1001);
  CHECK(std::abs(f.value - 0.5) <= 1e-3);
  f = fill_distance(PointSet::from_scalars({0.0, 0.5, 1.0}), unit, 1001);
  CHECK(std::abs(f.value - 0.25) <= 1e-3);
  CHECK(f.tolerance == doctest::Approx(1e-3));
  CHECK(f.grid_points == 1001);

  std::mt19937_64 eng(17);
  const auto x = random_set(eng, 20, 2);
  const auto sq = Domain::cube(2, 0, 1);
  CHECK(fill_distance(x, sq, 201).value == oracle::fill_on_grid(to_vec(x), 2, 0.0, 1.0, 201));
  CHECK(fill_distance(x, sq, 201).tolerance == doctest::Approx(std::sqrt(2.0) / 200.0));
}

TEST_CASE("fill distance error paths") {
  const auto x = PointSet::from_scalars({0.5});
  CHECK_ERROR_CODE(fill_distance(x, Domain::interval(0, 1), 1), ErrorCode::InvalidInput);
  CHECK_ERROR_CODE(fill_distance(PointSet(3, {0.5, 0.5, 0.5}), Domain::cube(3, 0, 1), 1000, 1000),
                   ErrorCode::GridTooLarge);
  CHECK_ERROR_CODE(fill_distance(x, Domain::cube(2, 0, 1), 10), ErrorCode::DimensionMismatch);
  CHECK_ERROR_CODE(PointSet(1, {}), ErrorCode::EmptyPointSet);
  CHECK_ERROR_CODE(PointSet::from_scalars({0.1, 0.1}), ErrorCode::InvalidInput);
}

TEST_CASE("exact 1D fill distance agrees with the grid value within its tolerance") {
  std::mt19937_64 eng(8);
  const auto dom = Domain::interval(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_set(eng, 15, 1);
    const double exact = fill_distance_1d(x, dom);
    const auto grid = fill_distance(x, dom, 2001);
    CHECK(grid.value <= exact + 1e-15);
    CHECK(exact <= grid.value + grid.tolerance);
  }
  CHECK(fill_distance_1d(PointSet::from_scalars({0.0, 0.5, 1.0}), dom) == 0.25);
}

TEST_CASE("generated point sets") {
  const auto g = generate_points(Scheme::uniform_grid, 3, Domain::interval(0, 1), 123);
  REQUIRE(g.size() == 3);
  CHECK(g.point(0)[0] == 0.0);
  CHECK(g.point(1)[0] == 0.5);
  CHECK(g.point(2)[0] == 1.0);

  const auto lat = generate_points(Scheme::uniform_grid, 9, Domain::cube(2, 0, 1), 0);
  REQUIRE(lat.size() == 9);
  const auto f = fill_distance(lat, Domain::cube(2, 0, 1), 401);
  CHECK(std::abs(f.value - std::sqrt(2.0) / 4.0) <= f.tolerance);
  CHECK(f.value == oracle::fill_on_grid(to_vec(lat), 2, 0.0, 1.0, 401));

  const auto rounded = generate_points(Scheme::uniform_grid, 10, Domain::cube(2, 0, 1), 0);
  CHECK(rounded.size() == 9);
  CHECK(rounded.requested_count() == 10);

  const auto a = generate_points(Scheme::iid_uniform, 100, Domain::interval(0, 1), 7);
  const auto b = generate_points(Scheme::iid_uniform, 100, Domain::interval(0, 1), 7);
  CHECK(to_vec(a) == to_vec(b));
  const auto c = generate_points(Scheme::iid_uniform, 100, Domain::interval(0, 1), 8);
  CHECK(to_vec(a) != to_vec(c));

  CHECK_ERROR_CODE(generate_points(Scheme::halton, 0, Domain::interval(0, 1), 0), ErrorCode::InvalidCount);
  CHECK_ERROR_CODE(generate_points(Scheme::iid_uniform, -4, Domain::interval(0, 1), 0), ErrorCode::InvalidCount);
}

TEST_CASE("every scheme gives distinct points inside the domain and is deterministic") {
  for (auto s : {Scheme::uniform_grid, Scheme::jittered_grid, Scheme::halton, Scheme::iid_uniform}) {
    for (std::size_t d : {1u, 2u, 3u}) {
      const auto dom = Domain::cube(d, -1.0, 2.0);
      const auto x = generate_points(s, 64, dom, 42);
      CHECK(x.inside(dom));
      CHECK(separation_distance(x) > 0.0);
      CHECK(to_vec(x) == to_vec(generate_points(s, 64, dom, 42)));
    }
  }
}

TEST_CASE("halton uses prime bases from index 1") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3.0));
  const auto x = generate_points(Scheme::halton, 2, Domain::cube(2, 0, 1), 0);
  CHECK(x.point(0)[0] == 0.5);
  CHECK(x.point(0)[1] == doctest::Approx(1.0 / 3.0));
  CHECK(x.point(1)[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("quasi-uniformity ratio examples") {
  const auto unit = Domain::interval(0, 1);
  const auto grid = generate_points(Scheme::uniform_grid, 11, unit, 0);
  CHECK(quasi_uniformity_ratio(grid, unit, 2001) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(quasi_uniformity_ratio(PointSet::from_scalars({0.0, 0.5, 1.0}), unit, 1001) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(quasi_uniformity_ratio(PointSet::from_scalars({0.0, 0.01, 1.0}), unit, 1001) ==
        doctest::Approx(0.005 / 0.495).epsilon(1e-3));
}

TEST_CASE("q <= h + tolerance for generated sets") {
  for (auto s : {Scheme::uniform_grid, Scheme::jittered_grid, Scheme::halton, Scheme::iid_uniform}) {
    for (std::size_t d : {1u, 2u}) {
      for (int n : {4, 9, 30, 100}) {
        const auto dom = Domain::cube(d, 0, 1);
        const auto x = generate_points(s, n, dom, 5);
        if (x.size() < 2) continue;
        const auto h = fill_distance(x, dom, d == 1 ? 4001 : 301);
        CHECK(separation_distance(x) <= h.value + h.tolerance);
      }
    }
  }
}

TEST_CASE("uniform grids fill at the optimal rate") {
  for (std::size_t d : {1u, 2u}) {
    for (int n : {4, 9, 16, 64, 256}) {
      const auto dom = Domain::cube(d, 0, 1);
      const auto x = generate_points(Scheme::uniform_grid, n, dom, 0);
      const double h = fill_distance(x, dom, d == 1 ? 4001 : 513).value;
      const double scaled = h * std::pow(static_cast<double>(x.size()), 1.0 / static_cast<double>(d));
      CHECK(scaled >= 0.4);
      CHECK(scaled <= 1.5);
    }
  }
}

TEST_CASE("fill distance is monotone under insertion") {
  std::mt19937_64 eng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto dom = Domain::cube(2, 0, 1);
  std::vector<double> c{u(eng), u(eng)};
  double prev = fill_distance(PointSet(2, c), dom, 101).value;
  for (int i = 0; i < 40; ++i) {
    c.push_back(u(eng));
    c.push_back(u(eng));
    const double h = fill_distance(PointSet(2, c), dom, 101).value;
    CHECK(h <= prev);
    prev = h;
  }
}

TEST_CASE("CSV round trip is exact") {
  const auto x = generate_points(Scheme::iid_uniform, 25, Domain::cube(3, -2, 5), 9);
  std::stringstream ss;
  write_csv(x, ss);
  CHECK(ss.str().rfind("x_1,x_2,x_3\n", 0) == 0);
  const auto y = read_csv(ss);
  CHECK(y.dim() == 3);
  CHECK(to_vec(x) == to_vec(y));

  std::stringstream bad("x_1,x_2\n1,2\n3\n");
  CHECK_ERROR_CODE(read_csv(bad), ErrorCode::IoError);
  std::stringstream nan("x_1\nfoo\n");
  CHECK_ERROR_CODE(read_csv(nan), ErrorCode::IoError);
}

TEST_CASE("scheme names round trip") {
  for (auto s : {Scheme::uniform_grid, Scheme::jittered_grid, Scheme::halton, Scheme::iid_uniform}) {
    CHECK(parse_scheme(name(s)) == s);
  }
  CHECK_ERROR_CODE(parse_scheme("sobol"), ErrorCode::InvalidInput);
}
