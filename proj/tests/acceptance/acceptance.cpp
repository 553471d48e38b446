// Acceptance checks, one criterion per invocation:
//   acceptance --criterion N [--cli PATH]
// Prints a single PASS/FAIL line with the measured values and exits 0 on PASS.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "specreg/experiments.hpp"
#include "specreg/filters.hpp"
#include "specreg/geometry.hpp"
#include "specreg/kernels.hpp"
#include "specreg/operators.hpp"
#include "specreg/regularization.hpp"

using namespace specreg;
namespace ex = specreg::experiments;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, fixed here so a run cannot loosen them.
constexpr double kCertTol = 1e-6;
constexpr double kTsvdTol = 1e-12;
constexpr double kLandweberTol = 1e-9;
constexpr double kCertSeconds = 5.0;
constexpr double kRidgeTol = 1e-8;
constexpr double kRidgeSeconds = 30.0;
constexpr double kLemmaSeconds = 60.0;
constexpr double kInterpTol = 1e-8;
constexpr double kAdjointSlopeLimit = -(2.0 / 3.0 - 0.15);
constexpr double kA1SlopeLimit = -(1.0 / 3.0 - 0.10);
constexpr double kRateSeconds = 600.0;
constexpr double kNoiseBound = (2.0 / std::numbers::pi) * 1.0 * 0.1 / (10.0 * 0.01);
constexpr double kLinearityTol = 0.10;
constexpr double kStabilityFactor = 3.0;
constexpr double kProbeSlope = -0.5;
constexpr double kProbeSlopeTol = 0.2;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Outcome filter_certificates() {
  const auto t0 = Clock::now();
  const auto ls = filters::log_grid(1e-6, 10.0, 10000);
  auto ts = filters::log_grid(1e-6, 10.0, 10000);
  ts.insert(ts.begin(), 0.0);
  const std::vector<double> half{0.5}, one{1.0};
  const auto tik = filters::certify_constants(filters::FilterFunction::tikhonov(), ls, ts, half);
  const auto tsvd_ls = filters::log_grid(1e-6, 10.0, 200);
  const auto tsvd = filters::certify_constants(filters::FilterFunction::tsvd(), tsvd_ls, ts, one);

  double lw_d = 0.0;
  const auto lw = filters::FilterFunction::landweber(1.0);
  std::vector<double> lw_ls;
  for (int m = 1; m <= 64; ++m) lw_ls.push_back(1.0 / m);
  auto lw_ts = filters::log_grid(1e-9, 1.0, 10000);
  lw_ts.insert(lw_ts.begin(), 0.0);
  lw_d = filters::certify_constants(lw, lw_ls, lw_ts, half).D.value;
  const double secs = since(t0);

  const bool ok = std::abs(tik.D.value - 1.0) <= kCertTol && std::abs(tik.E.value - 1.0) <= kCertTol &&
                  std::abs(tik.C_of(0.5) - 0.5) <= kCertTol && std::abs(tsvd.C_of(1.0) - 1.0) <= kTsvdTol &&
                  lw_d <= 1.0 + kLandweberTol && secs < kCertSeconds;
  return {ok, "tikhonov D=" + fmt(tik.D.value) + " E=" + fmt(tik.E.value) + " C_1/2=" + fmt(tik.C_of(0.5)) +
                  " tsvd C_1=" + fmt(tsvd.C_of(1.0)) + " landweber D=" + fmt(lw_d) + " time=" + fmt(secs) + "s"};
}

Outcome ridge_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(20240602);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> loglam(-6.0, 0.0);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const bool brownian = inst % 2 == 0;
    const auto n = static_cast<std::size_t>(size(eng));
    const auto xs = brownian ? oracle::random_points(eng, n, 0.0, 1.0) : oracle::random_points(eng, n, -3.0, 3.0);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (auto& v : y) v = g(eng);
    const double lambda = std::pow(10.0, loglam(eng));
    const auto k = brownian ? kernels::KernelModel::brownian() : kernels::KernelModel::gaussian_autocorrelation();
    const auto s = regularization::solve(k, geometry::PointSet::from_scalars(xs), std::span(y.data(), n),
                                         filters::FilterFunction::tikhonov(), lambda);
    const auto K = brownian ? oracle::brownian_gram(xs) : oracle::gaussian_gram(xs);
    const auto ref = oracle::ridge(K, y, lambda);
    worst = std::max(worst, (s.a - ref).norm() / ref.norm());
  }
  const double secs = since(t0);
  return {worst <= kRidgeTol && secs < kRidgeSeconds,
          "instances=200 worst_rel_err=" + fmt(worst) + " time=" + fmt(secs) + "s"};
}

Outcome lemma_sweep() {
  const auto t0 = Clock::now();
  const auto cfg = ex::config_from_json({{"schema", 1},
                                         {"base_seed", 20240603},
                                         {"lemma",
                                          {{"instances", 100},
                                           {"lambda_count", 20},
                                           {"slack", 1e-6},
                                           {"filters", {"tikhonov", "tsvd", "landweber"}}}}});
  const auto rep = ex::run_lemma_bounds(cfg);
  const double secs = since(t0);
  return {rep.passed() && rep.instances >= 100 && secs < kLemmaSeconds,
          "instances=" + std::to_string(rep.instances) + " checks=" + std::to_string(rep.checks) +
              " violations=" + std::to_string(rep.discrete_violations + rep.norm_violations) +
              " worst_discrete_ratio=" + fmt(rep.worst_discrete_ratio) +
              " worst_norm_ratio=" + fmt(rep.worst_norm_ratio) + " time=" + fmt(secs) + "s"};
}

Outcome interpolation_limit() {
  std::mt19937_64 eng(20240604);
  const auto p = operators::ForwardProblem::integration();
  const auto pairs = operators::builtin_source_pairs(p);
  double worst = 0.0;
  int instances = 0;
  for (std::size_t n : {8u, 32u, 128u, 256u, 512u}) {
    for (int rep = 0; rep < 2; ++rep) {
      // Nodes away from 0 keep the Brownian Gram matrix full rank.
      const auto xs = rep == 0 ? oracle::random_points(eng, n, 0.0, 1.0) : [&] {
        std::vector<double> v;
        for (std::size_t i = 1; i <= n; ++i) v.push_back(static_cast<double>(i) / static_cast<double>(n));
        return v;
      }();
      const auto x = geometry::PointSet::from_scalars(xs);
      const auto y = operators::sample_data(p, pairs[(n + rep) % pairs.size()], x);
      const auto sys = regularization::GramSystem::build(p.kernel(), x);
      const double mu_min = sys->eig().eigenvalues.minCoeff();
      if (!(mu_min > 0.0)) return {false, "Gram matrix not full rank at n=" + std::to_string(n)};
      const auto s = regularization::solve(sys, y, filters::FilterFunction::tsvd(), 0.5 * mu_min);
      const double ynorm = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()).norm();
      worst = std::max(worst, regularization::discrete_residual_norm(s, y) / ynorm);
      ++instances;
    }
  }
  return {worst <= kInterpTol, "instances=" + std::to_string(instances) + " max_n=512 worst_rel_residual=" + fmt(worst)};
}

nlohmann::json rate_config(bool adjoint) {
  nlohmann::json functional =
      adjoint ? nlohmann::json{{"class", "adjoint"}, {"psi0", "smoothed-indicator"}, {"a", 0.2}, {"b", 0.7}, {"eps", 0.1}}
              : nlohmann::json{{"class", "a1"}, {"nodes", {0.2, 0.7}}, {"weights", {-1.0, 1.0}}};
  return {{"schema", 1},
          {"problem", {{"operator", "integration"}, {"source_pair", "constant"}}},
          {"kernel", {{"family", "brownian"}}},
          {"filter", {{"kind", "tikhonov"}}},
          {"functional", functional},
          {"n_schedule", {32, 64, 128, 256, 512, 1024}},
          {"point_scheme", "uniform-grid"},
          {"lambda_rule", {{"type", "optimal"}, {"class", adjoint ? "adjoint" : "a1"}, {"trace_class", true}}},
          {"nu", 0.05},
          {"trials", 200},
          {"base_seed", 20240601},
          {"slope_band", adjoint ? 0.15 : 0.10}};
}

Outcome rate_study(bool adjoint) {
  const auto t0 = Clock::now();
  const auto res = ex::run_rate_study(ex::config_from_json(rate_config(adjoint)));
  const double secs = since(t0);
  const double limit = adjoint ? kAdjointSlopeLimit : kA1SlopeLimit;
  const bool slope_ok = res.fit.slope <= limit;
  std::string detail = "slope=" + fmt(res.fit.slope) + " stderr=" + fmt(res.fit.stderr_) + " limit=" + fmt(limit) +
                       " dominance=" + (res.dominance_ok ? "true" : "false") + " C_f=" + fmt(res.C_f) +
                       " time=" + fmt(secs) + "s";
  return {slope_ok && res.dominance_ok && secs < kRateSeconds, detail};
}

Outcome noise_amplification() {
  const auto cfg = ex::config_from_json({{"schema", 1},
                                         {"problem", {{"operator", "integration"}, {"source_pair", "cosine"}}},
                                         {"kernel", {{"family", "brownian"}}},
                                         {"filter", {{"kind", "tikhonov"}}},
                                         {"trials", 500},
                                         {"base_seed", 20240605},
                                         {"noise_amp", {{"n_values", {100}}, {"nu_values", {0.05, 0.1, 0.2}}, {"lambda", 0.01}}}});
  const auto rep = ex::run_noise_amplification(cfg);
  double at_01 = std::nan(""), bound_01 = std::nan("");
  for (const auto& r : rep.rows) {
    if (r.nu == 0.1) {
      at_01 = r.mean_l2;
      bound_01 = r.bound_l2;
    }
  }
  // Deviation of mean_l2 / nu from its average over the three noise levels.
  const double dev = rep.max_linearity_deviation;
  const bool ok = at_01 <= kNoiseBound && std::abs(bound_01 - kNoiseBound) <= 1e-6 * kNoiseBound &&
                  rep.rows.size() == 3 && dev <= kLinearityTol && rep.within_bounds;
  return {ok, "mean_l2(nu=0.1)=" + fmt(at_01) + " bound=" + fmt(kNoiseBound) + " ratio=" + fmt(at_01 / kNoiseBound) +
                  " linearity_deviation=" + fmt(dev)};
}

Outcome sampling_probe() {
  const auto cfg = ex::config_from_json({{"schema", 1},
                                         {"problem", {{"operator", "integration"}, {"source_pair", "cosine"}}},
                                         {"kernel", {{"family", "brownian"}}},
                                         {"filter", {{"kind", "tikhonov"}}},
                                         {"sampling_probe", {{"h0", 1.0 / 16.0}, {"halvings", 5}, {"stability_factor", kStabilityFactor}}}});
  const auto rep = ex::run_sampling_probe(cfg);
  const double slope = rep.schedule_fit.slope;
  const bool slope_ok = std::abs(slope - kProbeSlope) <= kProbeSlopeTol;
  const bool stable = rep.stability_ratio_sup < kStabilityFactor && rep.stability_ratio_l2 < kStabilityFactor;
  return {slope_ok && stable && rep.levels.size() == 6,
          "levels=" + std::to_string(rep.levels.size()) + " stability_sup=" + fmt(rep.stability_ratio_sup) +
              " stability_l2=" + fmt(rep.stability_ratio_l2) + " schedule_slope=" + fmt(slope) + " expected=" +
              fmt(kProbeSlope) + "+-" + fmt(kProbeSlopeTol)};
}

Outcome geometry_oracles() {
  std::mt19937_64 eng(20240606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int sets = 0, mismatches = 0, q_violations = 0;
  for (std::size_t d : {1u, 2u}) {
    const auto dom = geometry::Domain::cube(d, 0.0, 1.0);
    const std::size_t res = d == 1 ? 2001 : 101;
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = 2 + static_cast<std::size_t>(rep % 40);
      std::vector<double> c(n * d);
      for (auto& v : c) v = u(eng);
      const geometry::PointSet x(d, c);
      const double q = geometry::separation_distance(x);
      const auto h = geometry::fill_distance(x, dom, res);
      if (q != oracle::separation(c, d)) ++mismatches;
      if (h.value != oracle::fill_on_grid(c, d, 0.0, 1.0, res)) ++mismatches;
      if (!(q <= h.value + h.tolerance)) ++q_violations;
      ++sets;
    }
  }
  return {mismatches == 0 && q_violations == 0,
          "sets=" + std::to_string(sets) + " oracle_mismatches=" + std::to_string(mismatches) +
              " q_le_h_violations=" + std::to_string(q_violations)};
}

Outcome cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli path given"};
  const auto dir = fs::temp_directory_path() / "specreg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = rate_config(false);
  cfg["trials"] = 100;
  {
    std::ofstream out(dir / "config.json");
    out << cfg.dump(2);
  }
  std::string csv[2];
  for (int run = 0; run < 2; ++run) {
    const auto out_dir = dir / ("run" + std::to_string(run));
    const std::string cmd = "\"" + cli + "\" rates --quiet --config \"" + (dir / "config.json").string() +
                            "\" --out \"" + out_dir.string() + "\"";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return {false, "could not launch " + cli};
    std::ifstream in(out_dir / "rates.csv", std::ios::binary);
    if (!in) return {false, "run " + std::to_string(run) + " wrote no rates.csv"};
    std::stringstream ss;
    ss << in.rdbuf();
    csv[run] = ss.str();
  }
  fs::remove_all(dir);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, "runs=2 bytes=" + std::to_string(csv[0].size()) + " identical=" + (same ? "true" : "false")};
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      criterion = std::atoi(argv[++i]);
    } else if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::cerr << "usage: acceptance --criterion N [--cli PATH]\n";
      return 2;
    }
  }
  const std::function<Outcome()> checks[] = {
      filter_certificates, ridge_identity, lemma_sweep, interpolation_limit, [] { return rate_study(true); },
      [] { return rate_study(false); }, noise_amplification, sampling_probe, geometry_oracles,
      [&] { return cli_determinism(cli); }};
  if (criterion < 1 || criterion > 10) {
    std::cerr << "criterion must be in 1..10\n";
    return 2;
  }
  Outcome o;
  try {
    o = checks[criterion - 1]();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << o.detail << std::endl;
  return o.pass ? 0 : 1;
}
