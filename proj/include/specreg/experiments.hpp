#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specreg/filters.hpp"
#include "specreg/geometry.hpp"
#include "specreg/parallel.hpp"
#include "specreg/weak_error.hpp"

namespace specreg::experiments {

inline constexpr int kSchemaVersion = 1;

struct LambdaRule {
  enum class Type { fixed, optimal, power_of_h } type = Type::fixed;
  double value = 1e-2;  // fixed value, or multiplier for the other rules
  weak_error::FunctionalClass cls = weak_error::FunctionalClass::adjoint;
  bool trace_class = true;
  double exponent = 1.0;  // lambda = value * h^exponent for power_of_h

  double evaluate(double n, double nu, double h, double d) const;
  nlohmann::json to_json() const;
};

/// Shared experiment description.  Study-specific settings live in `sections`
/// ("lemma", "noise_amp", "sampling_probe", "certify", "geometry") and are read
/// by the corresponding runner.
struct ExperimentConfig {
  nlohmann::json problem = {{"operator", "integration"}};
  nlohmann::json kernel;  // null: the problem's induced kernel
  nlohmann::json filter = {{"kind", "tikhonov"}};
  nlohmann::json source = "constant";
  nlohmann::json functional;
  std::vector<long long> n_schedule;
  geometry::Scheme scheme = geometry::Scheme::uniform_grid;
  LambdaRule lambda_rule;
  double nu = 0.0;
  long long trials = 1;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir = "out";
  /// Accepted deviation of the fitted slope from the theoretical exponent.
  double slope_band = 0.15;
  /// Record wall-clock times in outputs (off keeps outputs byte-reproducible).
  bool record_timing = false;
  nlohmann::json sections = nlohmann::json::object();
};

/// Throws ConfigInvalid on schema mismatch or malformed fields.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RateRecord {
  long long n = 0;
  double h = 0.0;
  double lambda = 0.0;
  double mean_err = 0.0;
  double std_err = 0.0;  // standard error of the Monte Carlo mean
  double bound = 0.0;
  double wall_time = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

/// Ordinary least squares of log(err) on log(n); throws DegenerateData.
SlopeFit fit_loglog_slope(std::span<const double> n, std::span<const double> err);
SlopeFit fit_loglog_slope(const std::vector<RateRecord>& records);

struct RateStudyResult {
  std::vector<RateRecord> records;
  SlopeFit fit;
  double C_f = 0.0;
  weak_error::Rate theory{};
  double slope_limit = 0.0;  // pass when fit.slope <= slope_limit
  bool slope_ok = false;
  bool dominance_ok = false;
  bool passed() const { return slope_ok && dominance_ok; }
  nlohmann::json to_json() const;
};

RateStudyResult run_rate_study(const ExperimentConfig& cfg);

struct LemmaReport {
  long long instances = 0;
  long long checks = 0;
  long long discrete_violations = 0;
  long long norm_violations = 0;
  double worst_discrete_ratio = 0.0;
  double worst_norm_ratio = 0.0;
  long long zero_solutions = 0;  // lambda above the spectrum with a cutoff filter
  bool passed() const { return discrete_violations == 0 && norm_violations == 0; }
  nlohmann::json to_json() const;
};

LemmaReport run_lemma_bounds(const ExperimentConfig& cfg);

struct NoiseAmpRow {
  long long n = 0;
  double nu = 0.0;
  double lambda = 0.0;
  double mean_l2 = 0.0;   // E ||g_hat_delta - g_hat||_{L2}
  double mean_sup = 0.0;  // max_x E |g_hat_delta - g_hat|(x)
  double bound_l2 = 0.0;
  double bound_sup = 0.0;
  double bound_l2_trace = 0.0;
  double bound_sup_trace = 0.0;
};

struct NoiseAmpReport {
  std::vector<NoiseAmpRow> rows;
  bool within_bounds = false;
  bool linear_in_nu = false;  // mean_l2 / nu constant within 10% at each n
  double max_linearity_deviation = 0.0;
  bool passed() const { return within_bounds && linear_in_nu; }
  nlohmann::json to_json() const;
};

NoiseAmpReport run_noise_amplification(const ExperimentConfig& cfg);

struct ProbeLevel {
  double h = 0.0;
  long long n = 0;
  double c_prime_sup = 0.0;  // max over the lambda grid of sup-error / factor
  double c_prime_l2 = 0.0;
  double schedule_lambda = 0.0;
  double schedule_sup_err = 0.0;
  double schedule_l2_err = 0.0;
};

struct SamplingProbeReport {
  std::vector<ProbeLevel> levels;
  double stability_ratio_sup = 0.0;  // max/min of C' over the two finest levels
  double stability_ratio_l2 = 0.0;
  SlopeFit schedule_fit;  // log sup-error against log h
  double expected_slope = 0.0;
  double slope_tolerance = 0.2;
  bool stable = false;
  bool slope_ok = false;
  /// The power-law schedule exists only for finite smoothness.
  bool slope_applicable = true;
  bool passed() const { return stable && (slope_ok || !slope_applicable); }
  nlohmann::json to_json() const;
};

SamplingProbeReport run_sampling_probe(const ExperimentConfig& cfg);

struct CertificationReport {
  std::vector<filters::Certificate> certificates;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
  nlohmann::json to_json() const;
};

CertificationReport run_filter_certification(const ExperimentConfig& cfg);

struct GeometryRow {
  std::string scheme;
  long long n = 0;
  double fill = 0.0;
  double fill_tolerance = 0.0;
  double separation = 0.0;
};

struct GeometryReport {
  std::vector<GeometryRow> rows;
  bool passed() const;
  nlohmann::json to_json() const;
};

GeometryReport run_geometry(const ExperimentConfig& cfg);

/// RFC 4180 CSV: n,h,lambda,mean_err,std_err,bound,wall_time.
void write_rates_csv(const std::vector<RateRecord>& records, std::ostream& os);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained 800x600 log-log plot, one polyline per series.
std::string render_loglog_svg(const std::vector<Series>& series, const std::string& title,
                              const std::string& annotation);

/// Writes <stem>.csv and <stem>.svg under dir; throws IoError, and writes
/// nothing for an empty record list.
void emit_outputs(const std::vector<RateRecord>& records, const std::optional<SlopeFit>& fit,
                  const std::filesystem::path& dir, const std::string& stem);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

using specreg::parallel_for;
using specreg::worker_count;

}  // namespace specreg::experiments
