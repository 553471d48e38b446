#include "specreg/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"
#include "specreg/parallel.hpp"

namespace specreg::filters {

FilterFunction FilterFunction::landweber(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidInput, "landweber step size must be positive");
  }
  return FilterFunction(Kind::landweber, gamma);
}

std::string FilterFunction::name() const {
  switch (kind_) {
    case Kind::tikhonov: return "tikhonov";
    case Kind::tsvd: return "tsvd";
    case Kind::landweber: return "landweber";
  }
  return "unknown";
}

double FilterFunction::qualification() const {
  return kind_ == Kind::tikhonov ? 1.0 : std::numeric_limits<double>::infinity();
}

double FilterFunction::snap_lambda(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  if (kind_ != Kind::landweber) return lambda;
  return 1.0 / std::max(1.0, std::round(1.0 / lambda));
}

std::int64_t FilterFunction::iterations(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  const double inv = 1.0 / lambda;
  const double m = std::round(inv);
  if (m < 1.0 || std::abs(inv - m) > 1e-9 * m) {
    throw Error(ErrorCode::InvalidLambda, "landweber lambda must be 1/m for a positive integer m");
  }
  return static_cast<std::int64_t>(m);
}

void FilterFunction::check(double lambda, double t) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidInput, "t must be non-negative");
  if (kind_ == Kind::landweber && t > 0.0 && !(gamma_ * t < 2.0)) {
    throw Error(ErrorCode::LandweberContraction, "|1 - gamma t| >= 1");
  }
}

double FilterFunction::s(double lambda, double t) const {
  check(lambda, t);
  switch (kind_) {
    case Kind::tikhonov: return 1.0 / (lambda + t);
    case Kind::tsvd: return t >= lambda ? 1.0 / t : 0.0;
    case Kind::landweber: {
      const auto m = static_cast<double>(iterations(lambda));
      if (t == 0.0) return gamma_ * m;
      const double gt = gamma_ * t;
      // gamma sum_{k<m} (1 - gt)^k; expm1/log1p keeps it accurate for small gt.
      if (gt <= 1.0) return -std::expm1(m * std::log1p(-gt)) / t;
      return (1.0 - std::pow(1.0 - gt, m)) / t;
    }
  }
  return 0.0;
}

nlohmann::json FilterFunction::to_json() const {
  nlohmann::json j{{"kind", name()}};
  if (kind_ == Kind::landweber) j["gamma"] = gamma_;
  return j;
}

FilterFunction filter_from_json(const nlohmann::json& spec) {
  try {
    const auto kind = spec.is_string() ? spec.get<std::string>() : spec.at("kind").get<std::string>();
    if (kind == "tikhonov") return FilterFunction::tikhonov();
    if (kind == "tsvd") return FilterFunction::tsvd();
    if (kind == "landweber") {
      return FilterFunction::landweber(spec.is_object() ? spec.value("gamma", 1.0) : 1.0);
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown filter '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("filter spec: ") + e.what());
  }
}

double Certificate::C_of(double a) const {
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    if (a_list[i] == a) return C[i].value;
  }
  throw Error(ErrorCode::InvalidInput, "exponent not certified");
}

namespace {

nlohmann::json argmax_json(const ArgMax& m) {
  return {{"value", m.value}, {"lambda", m.lambda}, {"t", m.t}};
}

void update(ArgMax& m, double v, double lambda, double t) {
  if (v > m.value) m = {v, lambda, t};
}

}  // namespace

nlohmann::json Certificate::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    auto e = argmax_json(C[i]);
    e["a"] = a_list[i];
    c.push_back(e);
  }
  return {{"filter", filter},
          {"lambda_range", {lambda_grid.front(), lambda_grid.back()}},
          {"t_range", {t_grid.front(), t_grid.back()}},
          {"lambda_grid", lambda_grid},
          {"t_grid_size", t_grid.size()},
          {"D", argmax_json(D)},
          {"E", argmax_json(E)},
          {"C", c}};
}

Certificate certify_constants(const FilterFunction& f, std::span<const double> lambda_grid,
                              std::span<const double> t_grid, std::span<const double> a_list) {
  if (lambda_grid.empty() || t_grid.empty()) throw Error(ErrorCode::EmptyGrid, "certificate grids must be non-empty");
  for (double a : a_list) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidInput, "exponents must be positive");
    if (a > f.qualification()) throw Error(ErrorCode::QualificationExceeded, "exponent exceeds the qualification");
  }
  Certificate cert;
  cert.filter = f.name();
  cert.a_list.assign(a_list.begin(), a_list.end());
  for (double l : lambda_grid) cert.lambda_grid.push_back(f.snap_lambda(l));
  std::sort(cert.lambda_grid.begin(), cert.lambda_grid.end());
  cert.lambda_grid.erase(std::unique(cert.lambda_grid.begin(), cert.lambda_grid.end()), cert.lambda_grid.end());

  cert.t_grid.assign(t_grid.begin(), t_grid.end());
  std::sort(cert.t_grid.begin(), cert.t_grid.end());
  const double t_lo = cert.t_grid.front();
  const double t_hi = cert.t_grid.back();
  if (f.kind() == Kind::tsvd) {
    for (double l : cert.lambda_grid) {
      for (double probe : {l, std::nextafter(l, 0.0)}) {
        if (probe >= t_lo && probe <= t_hi) cert.t_grid.push_back(probe);
      }
    }
  }
  std::sort(cert.t_grid.begin(), cert.t_grid.end());
  cert.t_grid.erase(std::unique(cert.t_grid.begin(), cert.t_grid.end()), cert.t_grid.end());

  const std::size_t nt = cert.t_grid.size();
  const std::size_t na = a_list.size();
  std::vector<double> t_pow(na * nt);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t k = 0; k < nt; ++k) t_pow[i * nt + k] = std::pow(cert.t_grid[k], a_list[i]);
  }
  // One partial maximum per lambda, reduced in grid order so the arg-max
  // matches a sequential scan.
  struct Partial {
    ArgMax D, E;
    std::vector<ArgMax> C;
  };
  std::vector<Partial> parts(cert.lambda_grid.size());
  parallel_for(parts.size(), [&](std::size_t j) {
    const double l = cert.lambda_grid[j];
    Partial& p = parts[j];
    p.C.assign(na, ArgMax{});
    std::vector<double> l_pow(na);
    for (std::size_t i = 0; i < na; ++i) l_pow[i] = std::pow(l, a_list[i]);
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = cert.t_grid[k];
      const double s = f.s(l, t);
      const double r = 1.0 - t * s;
      update(p.D, std::abs(t * s), l, t);
      update(p.E, std::abs(l * s), l, t);
      for (std::size_t i = 0; i < na; ++i) update(p.C[i], std::abs(t_pow[i * nt + k] * r) / l_pow[i], l, t);
    }
  });
  cert.C.assign(na, ArgMax{});
  for (const auto& p : parts) {
    update(cert.D, p.D.value, p.D.lambda, p.D.t);
    update(cert.E, p.E.value, p.E.lambda, p.E.t);
    for (std::size_t i = 0; i < na; ++i) update(cert.C[i], p.C[i].value, p.C[i].lambda, p.C[i].t);
  }
  return cert;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidInput, "invalid log grid");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace specreg::filters
