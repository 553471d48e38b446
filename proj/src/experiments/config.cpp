#include <cmath>
#include <fstream>

#include "specreg/error.hpp"
#include "specreg/experiments.hpp"

namespace specreg::experiments {

double LambdaRule::evaluate(double n, double nu, double h, double d) const {
  switch (type) {
    case Type::fixed: return value;
    case Type::optimal: return value * weak_error::optimal_lambda(cls, trace_class, n, nu, h, d);
    case Type::power_of_h: return value * std::pow(h, exponent);
  }
  return value;
}

nlohmann::json LambdaRule::to_json() const {
  switch (type) {
    case Type::fixed: return {{"type", "fixed"}, {"value", value}};
    case Type::optimal:
      return {{"type", "optimal"},
              {"class", cls == weak_error::FunctionalClass::adjoint ? "adjoint" : "a1"},
              {"trace_class", trace_class},
              {"constant", value}};
    case Type::power_of_h: return {{"type", "power-of-h"}, {"exponent", exponent}, {"constant", value}};
  }
  return {};
}

namespace {

LambdaRule parse_lambda_rule(const nlohmann::json& j) {
  LambdaRule r;
  if (j.is_number()) {
    r.value = j.get<double>();
    if (!(r.value > 0.0)) throw Error(ErrorCode::ConfigInvalid, "lambda must be positive");
    return r;
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "fixed") {
    r.value = j.at("value").get<double>();
  } else if (type == "optimal") {
    r.type = LambdaRule::Type::optimal;
    r.cls = weak_error::parse_class(j.at("class").get<std::string>());
    r.trace_class = j.value("trace_class", true);
    r.value = j.value("constant", 1.0);
  } else if (type == "power-of-h") {
    r.type = LambdaRule::Type::power_of_h;
    r.exponent = j.at("exponent").get<double>();
    r.value = j.value("constant", 1.0);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown lambda rule '" + type + "'");
  }
  if (!(r.value > 0.0)) throw Error(ErrorCode::ConfigInvalid, "lambda rule constant must be positive");
  return r;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::ConfigInvalid, "config needs \"schema\": " + std::to_string(kSchemaVersion));
  }
  try {
    ExperimentConfig c;
    if (j.contains("problem")) c.problem = j.at("problem");
    if (j.contains("kernel")) c.kernel = j.at("kernel");
    if (j.contains("filter")) c.filter = j.at("filter");
    if (c.problem.contains("source_pair")) c.source = c.problem.at("source_pair");
    if (j.contains("source_pair")) c.source = j.at("source_pair");
    if (j.contains("functional")) c.functional = j.at("functional");
    if (j.contains("n_schedule")) c.n_schedule = j.at("n_schedule").get<std::vector<long long>>();
    for (std::size_t i = 0; i < c.n_schedule.size(); ++i) {
      if (c.n_schedule[i] < 1) throw Error(ErrorCode::ConfigInvalid, "n_schedule entries must be positive");
      if (i > 0 && c.n_schedule[i] <= c.n_schedule[i - 1]) {
        throw Error(ErrorCode::ConfigInvalid, "n_schedule must be strictly increasing");
      }
    }
    if (j.contains("point_scheme")) c.scheme = geometry::parse_scheme(j.at("point_scheme").get<std::string>());
    if (j.contains("lambda_rule")) c.lambda_rule = parse_lambda_rule(j.at("lambda_rule"));
    c.nu = j.value("nu", 0.0);
    if (!(c.nu >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "nu must be non-negative");
    c.trials = j.value("trials", 1LL);
    if (c.trials < 1) throw Error(ErrorCode::ConfigInvalid, "trials must be >= 1");
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.output_dir = j.value("output_dir", std::string("out"));
    c.slope_band = j.value("slope_band", 0.15);
    c.record_timing = j.value("record_timing", false);
    for (const char* key : {"lemma", "noise_amp", "sampling_probe", "certify", "geometry"}) {
      if (j.contains(key)) c.sections[key] = j.at(key);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace specreg::experiments
