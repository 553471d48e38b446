#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "specreg/error.hpp"
#include "specreg/experiments.hpp"
#include "specreg/operators.hpp"
#include "specreg/quadrature.hpp"
#include "specreg/regularization.hpp"
#include "specreg/rng.hpp"

namespace specreg::experiments {

namespace {

using regularization::GramSystem;
using Clock = std::chrono::steady_clock;

template <class T>
T section_value(const ExperimentConfig& cfg, const char* section, const char* key, T fallback) {
  if (!cfg.sections.contains(section)) return fallback;
  const auto& s = cfg.sections.at(section);
  try {
    return s.value(key, fallback);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string(section) + "." + key + ": " + e.what());
  }
}

// Config errors surface as ConfigInvalid so the CLI can map them to exit code 2.
template <class F>
auto as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

struct Setup {
  operators::ForwardProblem problem;
  kernels::KernelModel kernel;
  operators::SourcePair source;
  filters::FilterFunction filter;
};

Setup make_setup(const ExperimentConfig& cfg) {
  return as_config([&] {
    auto problem = operators::problem_from_json(cfg.problem);
    auto kernel = cfg.kernel.is_null() ? problem.kernel() : operators::parse_kernel(cfg.kernel, problem);
    const bool matches = kernel.family() == problem.kernel().family() ||
                         (kernel.family() == kernels::Family::operator_induced &&
                          kernel.feature_map()->name() == problem.name());
    if (!matches) {
      throw Error(ErrorCode::ConfigInvalid, "kernel " + kernel.describe() + " is not induced by " + problem.name());
    }
    auto source = operators::source_from_json(problem, cfg.source);
    auto filter = filters::filter_from_json(cfg.filter);
    return Setup{std::move(problem), std::move(kernel), std::move(source), filter};
  });
}

geometry::PointSet make_points(const ExperimentConfig& cfg, const geometry::Domain& dom, long long n) {
  return as_config([&] { return geometry::generate_points(cfg.scheme, n, dom, cfg.base_seed); });
}

// Certificate on the spectrum actually met: {0}, a log grid up to the top
// eigenvalue and the eigenvalues themselves.
filters::Certificate certify_in_context(const filters::FilterFunction& f, const linalg::Vector& eigenvalues,
                                        std::span<const double> lambdas, std::span<const double> a_list) {
  const double tmax = std::max(eigenvalues.size() > 0 ? eigenvalues.maxCoeff() : 0.0, 1e-300);
  std::vector<double> t = filters::log_grid(1e-14 * tmax, tmax, 400);
  t.push_back(0.0);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) t.push_back(std::max(eigenvalues[i], 0.0));
  return filters::certify_constants(f, lambdas, t, a_list);
}

// Coefficient-space influence vector: pairing(y) = u . y - target.
std::vector<double> influence(const GramSystem& sys, const filters::FilterFunction& f, double lambda,
                              const std::vector<double>& w) {
  const auto& v = sys.eig().eigenvectors;
  const Eigen::Map<const linalg::Vector> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  linalg::Vector c = v.transpose() * wv;
  c.array() *= regularization::filtered_spectrum(sys, f, lambda).array();
  linalg::Vector u = v * c;
  if (sys.scaling() == regularization::Scaling::normalized) u /= static_cast<double>(sys.size());
  return {u.data(), u.data() + u.size()};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

struct MeanStd {
  double mean = 0.0;
  double std_err = 0.0;
};

MeanStd mean_and_stderr(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_err = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SlopeFit fit_loglog_slope(std::span<const double> n, std::span<const double> err) {
  if (n.size() != err.size()) throw Error(ErrorCode::DimensionMismatch, "slope fit needs paired data");
  if (n.size() < 3) throw Error(ErrorCode::DegenerateData, "slope fit needs at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(err[i] > 0.0) || !std::isfinite(err[i])) {
      throw Error(ErrorCode::DegenerateData, "slope fit needs positive finite values");
    }
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(err[i]));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateData, "slope fit needs distinct n");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.stderr_ = std::sqrt(rss / (k - 2.0) / sxx);
  return fit;
}

SlopeFit fit_loglog_slope(const std::vector<RateRecord>& records) {
  std::vector<double> n, e;
  for (const auto& r : records) {
    n.push_back(static_cast<double>(r.n));
    e.push_back(r.mean_err);
  }
  return fit_loglog_slope(n, e);
}

nlohmann::json RateStudyResult::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"n", r.n}, {"h", r.h}, {"lambda", r.lambda}, {"mean_err", r.mean_err},
                    {"std_err", r.std_err}, {"bound", r.bound}});
  }
  return {{"records", recs},
          {"slope", fit.slope},
          {"slope_stderr", fit.stderr_},
          {"slope_limit", slope_limit},
          {"theoretical_exponent", theory.error_exponent},
          {"lambda_exponent", theory.lambda_exponent},
          {"C_f", C_f},
          {"slope_ok", slope_ok},
          {"bound_dominance", dominance_ok},
          {"passed", passed()}};
}

RateStudyResult run_rate_study(const ExperimentConfig& cfg) {
  const auto setup = make_setup(cfg);
  if (cfg.n_schedule.size() < 3) throw Error(ErrorCode::ConfigInvalid, "rate study needs at least 3 n values");
  if (cfg.functional.is_null()) throw Error(ErrorCode::ConfigInvalid, "rate study needs a functional");
  const auto& dom = setup.problem.domain();
  const auto functional = as_config([&] { return weak_error::functional_from_json(cfg.functional, dom); });
  if (cfg.lambda_rule.type == LambdaRule::Type::optimal && !(cfg.nu > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "optimal lambda rule needs nu > 0");
  }
  const double tau = setup.kernel.smoothness();
  const double d = static_cast<double>(dom.dim());
  const bool trace = cfg.lambda_rule.trace_class;

  struct Level {
    RateRecord rec;
    double noise_free = 0.0;
    double bias_factor = 0.0;
    operators::OperatorConstants consts{};
    double E = 0.0;
  };
  std::vector<Level> levels;
  for (long long n : cfg.n_schedule) {
    const auto t0 = Clock::now();
    Level lv;
    const auto x = make_points(cfg, dom, n);
    lv.rec.n = static_cast<long long>(x.size());
    lv.rec.h = geometry::fill_distance_1d(x, dom);
    lv.rec.lambda = setup.filter.snap_lambda(cfg.lambda_rule.evaluate(static_cast<double>(x.size()), cfg.nu,
                                                                      lv.rec.h, d));
    const auto sys = GramSystem::build(setup.kernel, x);
    const auto y = operators::sample_data(setup.problem, setup.source, x);
    const auto pairing = functional.cls == weak_error::FunctionalClass::a1
                             ? weak_error::precompute_a1(*functional.a1, *sys, setup.source.g)
                             : weak_error::precompute_adjoint(*functional.adjoint, *sys, setup.source.g);
    // The weak error is linear in the data, so each trial costs one dot product.
    const auto u = influence(*sys, setup.filter, lv.rec.lambda, pairing.w);
    lv.noise_free = dot(u, y) - pairing.target;

    std::vector<double> errs(static_cast<std::size_t>(cfg.trials));
    parallel_for(errs.size(), [&](std::size_t t) {
      const auto yd = regularization::add_noise(y, {cfg.nu, cfg.base_seed + t});
      errs[t] = std::abs(dot(u, yd) - pairing.target);
    });
    const auto ms = mean_and_stderr(errs);
    lv.rec.mean_err = ms.mean;
    lv.rec.std_err = ms.std_err;

    const double lam[] = {lv.rec.lambda};
    lv.E = certify_in_context(setup.filter, sys->eig().eigenvalues, lam, {}).E.value;
    lv.consts = operators::operator_constants(setup.problem, x);
    const double smooth = std::pow(lv.rec.h, tau - d / 2.0) + std::sqrt(lv.rec.lambda);
    lv.bias_factor = functional.cls == weak_error::FunctionalClass::a1
                         ? functional.size() * smooth
                         : functional.size() * std::pow(lv.rec.h, d / 2.0) * smooth;
    lv.rec.wall_time = cfg.record_timing ? seconds_since(t0) : 0.0;
    levels.push_back(lv);
  }

  RateStudyResult res;
  // C_f from the noise-free pilot at the two smallest n.
  for (std::size_t i = 0; i < std::min<std::size_t>(2, levels.size()); ++i) {
    res.C_f = std::max(res.C_f, std::abs(levels[i].noise_free) / levels[i].bias_factor);
  }
  res.dominance_ok = true;
  for (auto& lv : levels) {
    weak_error::BoundParams p;
    p.C_f = res.C_f;
    p.h = lv.rec.h;
    p.tau = tau;
    p.d = d;
    p.lambda = lv.rec.lambda;
    p.nu = cfg.nu;
    p.n = static_cast<double>(lv.rec.n);
    p.consts = lv.consts;
    p.E = lv.E;
    p.trace_class = trace;
    lv.rec.bound = functional.cls == weak_error::FunctionalClass::a1 ? weak_error::bound_a1(functional.size(), p)
                                                                    : weak_error::bound_adjoint(functional.size(), p);
    if (!(lv.rec.mean_err <= lv.rec.bound)) res.dominance_ok = false;
    res.records.push_back(lv.rec);
  }
  res.theory = weak_error::theoretical_rate(functional.cls, trace, tau, d);
  res.slope_limit = -(res.theory.error_exponent - cfg.slope_band);
  try {
    res.fit = fit_loglog_slope(res.records);
    res.slope_ok = res.fit.slope <= res.slope_limit;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateData) throw;
    res.fit = {std::nan(""), std::nan("")};
    res.slope_ok = false;
  }
  return res;
}

nlohmann::json LemmaReport::to_json() const {
  return {{"instances", instances},
          {"checks", checks},
          {"discrete_violations", discrete_violations},
          {"norm_violations", norm_violations},
          {"worst_discrete_ratio", worst_discrete_ratio},
          {"worst_norm_ratio", worst_norm_ratio},
          {"zero_solutions", zero_solutions},
          {"passed", passed()}};
}

LemmaReport run_lemma_bounds(const ExperimentConfig& cfg) {
  const auto instances = section_value(cfg, "lemma", "instances", 100LL);
  const auto lambda_count = section_value(cfg, "lemma", "lambda_count", std::size_t{20});
  const auto n_min = section_value(cfg, "lemma", "n_min", 5LL);
  const auto n_max = section_value(cfg, "lemma", "n_max", 60LL);
  const auto slack = section_value(cfg, "lemma", "slack", 1e-6);
  const auto kernel_names =
      section_value(cfg, "lemma", "kernels", std::vector<std::string>{"brownian", "gaussian-autocorrelation"});
  const auto filter_names =
      section_value(cfg, "lemma", "filters", std::vector<std::string>{"tikhonov", "tsvd", "landweber"});
  if (instances < 1 || n_min < 1 || n_max < n_min || lambda_count < 1 || kernel_names.empty() || filter_names.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "invalid lemma section");
  }
  std::vector<kernels::KernelModel> kerns;
  for (const auto& k : kernel_names) kerns.push_back(as_config([&] { return kernels::from_json({{"family", k}}); }));
  for (const auto& f : filter_names) as_config([&] { return filters::filter_from_json(f); });

  struct Outcome {
    long long checks = 0, dv = 0, nv = 0, zeros = 0;
    double worst_d = 0.0, worst_n = 0.0;
  };
  std::vector<Outcome> out(static_cast<std::size_t>(instances));
  parallel_for(out.size(), [&](std::size_t i) {
    Rng rng(cfg.base_seed + i);
    const auto& k = kerns[i % kerns.size()];
    const bool unit = k.family() == kernels::Family::brownian;
    const double lo = unit ? 0.0 : -3.0, hi = unit ? 1.0 : 3.0;
    const auto n = static_cast<std::size_t>(n_min + static_cast<long long>(rng.next_u64() % (n_max - n_min + 1)));
    std::vector<double> xs;
    while (xs.size() < n) {
      const double v = rng.uniform(lo, hi);
      if (v > lo && std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
    }
    const auto sys = GramSystem::build(k, geometry::PointSet::from_scalars(xs), regularization::Scaling::gram);
    linalg::Vector c(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = rng.normal();
    const linalg::Vector yv = sys->gram() * c;
    const std::vector<double> y(yv.data(), yv.data() + yv.size());
    const double gnorm = std::sqrt(std::max(c.dot(yv), 0.0));
    const auto& mu = sys->eig().eigenvalues;
    const double tmax = std::max(mu.maxCoeff(), 1e-300);

    Outcome& o = out[i];
    for (const auto& fname : filter_names) {
      const auto f = fname == "landweber" ? filters::FilterFunction::landweber(1.0 / tmax)
                                          : filters::filter_from_json(fname);
      auto lambdas = filters::log_grid(1e-6 * tmax, 2.0 * tmax, lambda_count);
      for (auto& l : lambdas) l = f.snap_lambda(l);
      const double as[] = {0.5};
      const auto cert = certify_in_context(f, mu, lambdas, as);
      const double C = cert.C_of(0.5);
      const double D = cert.D.value;
      for (double l : cert.lambda_grid) {
        const auto s = regularization::solve(sys, y, f, l);
        const double res = regularization::discrete_residual_norm(s, y);
        const double norm = regularization::hk_norm(s);
        const double bd = C * std::sqrt(l) * gnorm;
        const double bn = D * gnorm;
        o.checks += 2;
        if (s.a.isZero(0.0)) ++o.zeros;
        if (res > bd * (1.0 + slack)) ++o.dv;
        if (norm > bn * (1.0 + slack)) ++o.nv;
        if (bd > 0.0) o.worst_d = std::max(o.worst_d, res / bd);
        if (bn > 0.0) o.worst_n = std::max(o.worst_n, norm / bn);
      }
    }
  });

  LemmaReport rep;
  rep.instances = instances;
  for (const auto& o : out) {
    rep.checks += o.checks;
    rep.discrete_violations += o.dv;
    rep.norm_violations += o.nv;
    rep.zero_solutions += o.zeros;
    rep.worst_discrete_ratio = std::max(rep.worst_discrete_ratio, o.worst_d);
    rep.worst_norm_ratio = std::max(rep.worst_norm_ratio, o.worst_n);
  }
  return rep;
}

nlohmann::json NoiseAmpReport::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (const auto& row : rows) {
    r.push_back({{"n", row.n},
                 {"nu", row.nu},
                 {"lambda", row.lambda},
                 {"mean_l2", row.mean_l2},
                 {"mean_sup", row.mean_sup},
                 {"bound_l2", row.bound_l2},
                 {"bound_sup", row.bound_sup},
                 {"bound_l2_trace", row.bound_l2_trace},
                 {"bound_sup_trace", row.bound_sup_trace},
                 {"ratio_l2", row.mean_l2 / row.bound_l2}});
  }
  return {{"rows", r},
          {"within_bounds", within_bounds},
          {"linear_in_nu", linear_in_nu},
          {"max_linearity_deviation", max_linearity_deviation},
          {"passed", passed()}};
}

NoiseAmpReport run_noise_amplification(const ExperimentConfig& cfg) {
  const auto setup = make_setup(cfg);
  const auto n_values = section_value(cfg, "noise_amp", "n_values", std::vector<long long>{100});
  const auto nu_values = section_value(cfg, "noise_amp", "nu_values", std::vector<double>{0.05, 0.1, 0.2});
  const double lambda = setup.filter.snap_lambda(section_value(cfg, "noise_amp", "lambda", 0.01));
  const auto eval_points = section_value(cfg, "noise_amp", "eval_points", std::size_t{201});
  if (n_values.empty() || nu_values.empty() || eval_points < 2) {
    throw Error(ErrorCode::ConfigInvalid, "invalid noise_amp section");
  }
  for (double nu : nu_values) {
    if (!(nu >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "noise levels must be non-negative");
  }
  const auto& dom = setup.problem.domain();
  const double lo = dom.lower(0), hi = dom.upper(0);
  std::vector<double> grid(eval_points);
  for (std::size_t i = 0; i < eval_points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(eval_points - 1);
  }

  NoiseAmpReport rep;
  rep.within_bounds = true;
  rep.linear_in_nu = true;
  for (long long n : n_values) {
    const auto x = make_points(cfg, dom, n);
    const auto sys = GramSystem::build(setup.kernel, x);
    const auto nn = static_cast<Eigen::Index>(x.size());
    const auto& v = sys->eig().eigenvectors;
    // Noise-to-coefficient map S = (1/n) V s(Lambda) V^T.
    linalg::Matrix S = v * regularization::filtered_spectrum(*sys, setup.filter, lambda).asDiagonal() * v.transpose();
    S /= static_cast<double>(nn);

    std::vector<double> kinks;
    if (setup.kernel.has_kinks()) kinks.assign(x.coords().begin(), x.coords().end());
    const auto rule = quadrature::composite_uniform(lo, hi, 20, 8, kinks);
    linalg::Matrix Kq(static_cast<Eigen::Index>(rule.size()), nn);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      for (Eigen::Index i = 0; i < nn; ++i) {
        Kq(static_cast<Eigen::Index>(q), i) = setup.kernel.eval(rule.nodes[q], x.point(static_cast<std::size_t>(i))[0]);
      }
    }
    const Eigen::Map<const linalg::Vector> wq(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    const linalg::Matrix M = Kq.transpose() * wq.asDiagonal() * Kq;
    linalg::Matrix Ke(static_cast<Eigen::Index>(eval_points), nn);
    for (std::size_t g = 0; g < eval_points; ++g) {
      for (Eigen::Index i = 0; i < nn; ++i) {
        Ke(static_cast<Eigen::Index>(g), i) = setup.kernel.eval(grid[g], x.point(static_cast<std::size_t>(i))[0]);
      }
    }
    const double lam[] = {lambda};
    const double E = certify_in_context(setup.filter, sys->eig().eigenvalues, lam, {}).E.value;
    const auto consts = operators::operator_constants(setup.problem, x);
    const double c = std::sqrt(consts.c_phi_sq);
    const double sn = std::sqrt(static_cast<double>(nn));

    std::vector<double> per_nu;
    for (double nu : nu_values) {
      const auto trials = static_cast<std::size_t>(section_value(cfg, "noise_amp", "trials", cfg.trials));
      std::vector<double> l2(trials);
      std::vector<linalg::Vector> absvals(trials);
      const std::vector<double> zeros(static_cast<std::size_t>(nn), 0.0);
      parallel_for(trials, [&](std::size_t t) {
        const auto delta = regularization::add_noise(zeros, {nu, cfg.base_seed + t});
        const Eigen::Map<const linalg::Vector> dv(delta.data(), nn);
        const linalg::Vector a = S * dv;
        l2[t] = std::sqrt(std::max(a.dot(M * a), 0.0));
        absvals[t] = (Ke * a).cwiseAbs();
      });
      linalg::Vector mean_abs = linalg::Vector::Zero(static_cast<Eigen::Index>(eval_points));
      for (const auto& av : absvals) mean_abs += av;
      mean_abs /= static_cast<double>(trials);

      NoiseAmpRow row;
      row.n = nn;
      row.nu = nu;
      row.lambda = lambda;
      row.mean_l2 = mean_and_stderr(l2).mean;
      row.mean_sup = mean_abs.maxCoeff();
      row.bound_l2 = consts.sigma_max * E * nu * c / (sn * lambda);
      row.bound_sup = consts.c_phi_sq * E * nu / (sn * lambda);
      row.bound_l2_trace = consts.sigma_max * nu * E * consts.trace_bound / (static_cast<double>(nn) * lambda);
      row.bound_sup_trace = c * E * consts.trace_bound * nu / (static_cast<double>(nn) * lambda);
      if (!(row.mean_l2 <= row.bound_l2) || !(row.mean_sup <= row.bound_sup)) rep.within_bounds = false;
      if (nu > 0.0) per_nu.push_back(row.mean_l2 / nu);
      rep.rows.push_back(row);
    }
    if (per_nu.empty()) continue;
    const double ref = std::accumulate(per_nu.begin(), per_nu.end(), 0.0) / static_cast<double>(per_nu.size());
    for (double r : per_nu) {
      const double dev = std::abs(r - ref) / ref;
      rep.max_linearity_deviation = std::max(rep.max_linearity_deviation, dev);
      if (!(dev <= 0.10)) rep.linear_in_nu = false;
    }
  }
  return rep;
}

nlohmann::json SamplingProbeReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) {
    lv.push_back({{"h", l.h},
                  {"n", l.n},
                  {"c_prime_sup", l.c_prime_sup},
                  {"c_prime_l2", l.c_prime_l2},
                  {"schedule_lambda", l.schedule_lambda},
                  {"schedule_sup_err", l.schedule_sup_err},
                  {"schedule_l2_err", l.schedule_l2_err}});
  }
  return {{"levels", lv},
          {"stability_ratio_sup", stability_ratio_sup},
          {"stability_ratio_l2", stability_ratio_l2},
          {"schedule_slope", schedule_fit.slope},
          {"schedule_slope_stderr", schedule_fit.stderr_},
          {"expected_slope", expected_slope},
          {"slope_tolerance", slope_tolerance},
          {"slope_applicable", slope_applicable},
          {"stable", stable},
          {"slope_ok", slope_ok},
          {"passed", passed()}};
}

SamplingProbeReport run_sampling_probe(const ExperimentConfig& cfg) {
  const auto setup = make_setup(cfg);
  const auto& dom = setup.problem.domain();
  if (dom.dim() != 1) throw Error(ErrorCode::ConfigInvalid, "sampling probe is one-dimensional");
  if (!setup.source.hk_norm) throw Error(ErrorCode::ConfigInvalid, "sampling probe needs a known H_K norm");
  const double h0 = section_value(cfg, "sampling_probe", "h0", 1.0 / 16.0);
  const auto halvings = section_value(cfg, "sampling_probe", "halvings", 5LL);
  const auto lambdas = section_value(cfg, "sampling_probe", "lambda_grid",
                                     std::vector<double>{1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1});
  const auto eval_points = section_value(cfg, "sampling_probe", "eval_points", std::size_t{8193});
  const double stability_factor = section_value(cfg, "sampling_probe", "stability_factor", 3.0);
  SamplingProbeReport rep;
  rep.slope_tolerance = section_value(cfg, "sampling_probe", "slope_tolerance", 0.2);
  if (!(h0 > 0.0) || halvings < 2 || eval_points < 2) throw Error(ErrorCode::ConfigInvalid, "invalid sampling_probe section");

  const double tau = setup.kernel.smoothness();
  const double d = 1.0;
  const bool finite = std::isfinite(tau);
  // Analytic kernels: e^{c'/h}(e^{-(c' - c log h)/h} + sqrt(lambda)) for the Gaussian,
  // e^{c'/h}(e^{-(c' + c)/h} + sqrt(lambda)) for IMQ; c and c' are not specified, default 1.
  const double c_exp = section_value(cfg, "sampling_probe", "c", 1.0);
  const double c_exp_prime = section_value(cfg, "sampling_probe", "c_prime", 1.0);
  const double analytic_lambda = section_value(cfg, "sampling_probe", "schedule_lambda", 1e-8);
  const double lo = dom.lower(0), hi = dom.upper(0);
  const double gnorm = *setup.source.hk_norm;
  std::vector<double> grid(eval_points);
  for (std::size_t i = 0; i < eval_points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(eval_points - 1);
  }
  std::vector<double> gtrue(eval_points);
  for (std::size_t i = 0; i < eval_points; ++i) gtrue[i] = setup.source.g(grid[i]);

  std::vector<double> ns, errs;
  for (long long k = 0; k <= halvings; ++k) {
    const double h = h0 / std::pow(2.0, static_cast<double>(k));
    // Uniform grid with both endpoints has fill distance (hi - lo) / (2 (n - 1)).
    const auto n = static_cast<long long>(std::llround((hi - lo) / (2.0 * h))) + 1;
    const auto x = geometry::generate_points(geometry::Scheme::uniform_grid, n, dom, cfg.base_seed);
    const double hx = geometry::fill_distance_1d(x, dom);
    const auto sys = GramSystem::build(setup.kernel, x);
    const auto y = operators::sample_data(setup.problem, setup.source, x);
    std::vector<double> kinks;
    if (setup.kernel.has_kinks()) kinks.assign(x.coords().begin(), x.coords().end());
    const auto rule = quadrature::composite_uniform(lo, hi, 20, 8, kinks);

    auto errors = [&](double lam) {
      const auto s = regularization::solve(sys, y, setup.filter, lam);
      double sup = 0.0;
      for (std::size_t i = 0; i < eval_points; ++i) {
        sup = std::max(sup, std::abs(regularization::evaluate_g(s, grid[i]) - gtrue[i]));
      }
      double l2 = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double e = regularization::evaluate_g(s, rule.nodes[q]) - setup.source.g(rule.nodes[q]);
        l2 += rule.weights[q] * e * e;
      }
      return std::pair{sup, std::sqrt(l2)};
    };
    // sup-norm: gamma = infinity, so no h^{d/gamma} factor; L2: h^{d/2}.
    auto factor = [&](double lam, bool l2) {
      if (!finite) {
        const double decay = setup.kernel.family() == kernels::Family::imq
                                 ? std::exp(-(c_exp_prime + c_exp) / hx)
                                 : std::exp(-(c_exp_prime - c_exp * std::log(hx)) / hx);
        return std::exp(c_exp_prime / hx) * (decay + std::sqrt(lam)) * gnorm;
      }
      return (l2 ? std::pow(hx, d / 2.0) : 1.0) * (std::pow(hx, tau - d / 2.0) + std::sqrt(lam)) * gnorm;
    };

    ProbeLevel lv;
    lv.h = hx;
    lv.n = static_cast<long long>(x.size());
    lv.schedule_lambda = setup.filter.snap_lambda(finite ? std::pow(hx, 2.0 * tau - d) : analytic_lambda);
    std::vector<double> all = lambdas;
    all.push_back(lv.schedule_lambda);
    for (double lam : all) {
      const double l = setup.filter.snap_lambda(lam);
      const auto [sup, l2] = errors(l);
      lv.c_prime_sup = std::max(lv.c_prime_sup, sup / factor(l, false));
      lv.c_prime_l2 = std::max(lv.c_prime_l2, l2 / factor(l, true));
      if (lam == lv.schedule_lambda) {
        lv.schedule_sup_err = sup;
        lv.schedule_l2_err = l2;
      }
    }
    ns.push_back(static_cast<double>(lv.n));
    errs.push_back(lv.schedule_sup_err);
    rep.levels.push_back(lv);
  }
  const auto& a = rep.levels[rep.levels.size() - 2];
  const auto& b = rep.levels.back();
  rep.stability_ratio_sup = std::max(a.c_prime_sup, b.c_prime_sup) / std::min(a.c_prime_sup, b.c_prime_sup);
  rep.stability_ratio_l2 = std::max(a.c_prime_l2, b.c_prime_l2) / std::min(a.c_prime_l2, b.c_prime_l2);
  rep.stable = rep.stability_ratio_sup < stability_factor && rep.stability_ratio_l2 < stability_factor;
  rep.schedule_fit = fit_loglog_slope(ns, errs);
  rep.slope_applicable = finite;
  if (finite) {
    rep.expected_slope = -(tau - d / 2.0);
    rep.slope_ok = std::abs(rep.schedule_fit.slope - rep.expected_slope) <= rep.slope_tolerance;
  } else {
    rep.expected_slope = std::nan("");
  }
  return rep;
}

nlohmann::json CertificationReport::to_json() const {
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& c : certificates) certs.push_back(c.to_json());
  return {{"certificates", certs}, {"failures", failures}, {"passed", passed()}};
}

CertificationReport run_filter_certification(const ExperimentConfig& cfg) {
  const auto specs = section_value(cfg, "certify", "filters",
                                   nlohmann::json::array({"tikhonov", "tsvd", {{"kind", "landweber"}, {"gamma", 1.0}}}));
  const double lam_lo = section_value(cfg, "certify", "lambda_min", 1e-6);
  const double lam_hi = section_value(cfg, "certify", "lambda_max", 10.0);
  const auto lam_n = section_value(cfg, "certify", "lambda_count", std::size_t{200});
  const double t_lo = section_value(cfg, "certify", "t_min", 1e-6);
  const double t_hi = section_value(cfg, "certify", "t_max", 10.0);
  const auto t_n = section_value(cfg, "certify", "t_count", std::size_t{10000});
  const auto m_max = section_value(cfg, "certify", "landweber_max_iterations", 64LL);
  const double lw_t_max = section_value(cfg, "certify", "landweber_t_max", 1.0);

  CertificationReport rep;
  auto fail = [&](const std::string& msg) { rep.failures.push_back(msg); };
  for (const auto& spec : specs) {
    const auto f = as_config([&] { return filters::filter_from_json(spec); });
    std::vector<double> lambdas, ts, as;
    if (f.kind() == filters::Kind::landweber) {
      if (m_max < 1) throw Error(ErrorCode::ConfigInvalid, "landweber_max_iterations must be >= 1");
      for (long long m = 1; m <= m_max; ++m) lambdas.push_back(1.0 / static_cast<double>(m));
      ts = filters::log_grid(t_lo, std::min(lw_t_max, 2.0 / f.gamma() * (1.0 - 1e-12)), t_n);
      as = {0.5, 1.0, 2.0};
    } else {
      lambdas = filters::log_grid(lam_lo, lam_hi, lam_n);
      ts = filters::log_grid(t_lo, t_hi, t_n);
      as = f.kind() == filters::Kind::tikhonov ? std::vector<double>{0.5, 1.0} : std::vector<double>{0.5, 1.0, 2.0};
    }
    ts.push_back(0.0);
    auto cert = as_config([&] { return filters::certify_constants(f, lambdas, ts, as); });
    switch (f.kind()) {
      case filters::Kind::tikhonov:
        if (std::abs(cert.D.value - 1.0) > 1e-6) fail("tikhonov D = " + std::to_string(cert.D.value));
        if (std::abs(cert.E.value - 1.0) > 1e-6) fail("tikhonov E = " + std::to_string(cert.E.value));
        if (std::abs(cert.C_of(0.5) - 0.5) > 1e-6) fail("tikhonov C_1/2 = " + std::to_string(cert.C_of(0.5)));
        break;
      case filters::Kind::tsvd:
        for (double a : as) {
          if (std::abs(cert.C_of(a) - 1.0) > 1e-12) fail("tsvd C_" + std::to_string(a) + " != 1");
        }
        break;
      case filters::Kind::landweber:
        if (cert.D.value > 1.0 + 1e-9) fail("landweber D = " + std::to_string(cert.D.value));
        break;
    }
    rep.certificates.push_back(std::move(cert));
  }
  return rep;
}

bool GeometryReport::passed() const {
  for (const auto& r : rows) {
    if (r.n >= 2 && !(r.separation <= r.fill + r.fill_tolerance)) return false;
  }
  return !rows.empty();
}

nlohmann::json GeometryReport::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (const auto& row : rows) {
    r.push_back({{"scheme", row.scheme},
                 {"n", row.n},
                 {"fill", row.fill},
                 {"fill_tolerance", row.fill_tolerance},
                 {"separation", row.separation},
                 {"ratio", row.separation / row.fill}});
  }
  return {{"rows", r}, {"passed", passed()}};
}

GeometryReport run_geometry(const ExperimentConfig& cfg) {
  const auto dim = section_value(cfg, "geometry", "dim", std::size_t{1});
  const auto schemes = section_value(cfg, "geometry", "schemes",
                                     std::vector<std::string>{"uniform-grid", "jittered-grid", "halton", "iid-uniform"});
  auto n_values = section_value(cfg, "geometry", "n_values", std::vector<long long>{});
  if (n_values.empty()) n_values = cfg.n_schedule;
  if (n_values.empty()) n_values = {16, 64, 256};
  const auto resolution = section_value(cfg, "geometry", "resolution", std::size_t{0});
  const auto dom = as_config([&] { return geometry::Domain::cube(dim, 0.0, 1.0); });
  GeometryReport rep;
  for (const auto& name : schemes) {
    const auto scheme = as_config([&] { return geometry::parse_scheme(name); });
    for (long long n : n_values) {
      const auto x = as_config([&] { return geometry::generate_points(scheme, n, dom, cfg.base_seed); });
      GeometryRow row;
      row.scheme = name;
      row.n = static_cast<long long>(x.size());
      if (dim == 1) {
        row.fill = geometry::fill_distance_1d(x, dom);
      } else {
        const std::size_t res = resolution > 0 ? resolution : std::size_t{257};
        const auto fd = geometry::fill_distance(x, dom, res);
        row.fill = fd.value;
        row.fill_tolerance = fd.tolerance;
      }
      row.separation = x.size() >= 2 ? geometry::separation_distance(x) : 0.0;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace specreg::experiments
