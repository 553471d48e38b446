// Command-line front end for the regularization experiments.
//
// Exit codes: 0 when every check passes, 1 when a check fails or a numerical
// error occurs, 2 for configuration and I/O errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specreg/error.hpp"
#include "specreg/experiments.hpp"

namespace {

namespace ex = specreg::experiments;
using specreg::Error;
using specreg::ErrorCode;

struct GlobalOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  bool quiet = false;
};

ex::ExperimentConfig resolve_config(const GlobalOptions& g) {
  auto cfg = g.config.empty() ? ex::config_from_json({{"schema", ex::kSchemaVersion}}) : ex::load_config(g.config);
  if (!g.out.empty()) cfg.output_dir = g.out;
  if (g.seed) cfg.base_seed = *g.seed;
  if (g.trials) {
    if (*g.trials < 1) throw Error(ErrorCode::ConfigInvalid, "--trials must be >= 1");
    cfg.trials = *g.trials;
  }
  return cfg;
}

int finish(bool passed, const GlobalOptions& g, const std::string& what, const nlohmann::json& report,
           const std::filesystem::path& path) {
  ex::write_json(report, path);
  if (!g.quiet) {
    std::cout << report.dump(2) << "\n";
    std::cout << what << ": " << (passed ? "PASS" : "FAIL") << " (report: " << path.string() << ")\n";
  }
  return passed ? 0 : 1;
}

int run(const std::string& command, const GlobalOptions& g) {
  const auto cfg = resolve_config(g);
  const auto& dir = cfg.output_dir;
  if (command == "rates") {
    const auto res = ex::run_rate_study(cfg);
    ex::emit_outputs(res.records, res.fit, dir, "rates");
    auto report = res.to_json();
    report["config"] = {{"lambda_rule", cfg.lambda_rule.to_json()}, {"nu", cfg.nu}, {"trials", cfg.trials},
                        {"base_seed", cfg.base_seed}};
    return finish(res.passed(), g, "rates", report, dir / "rates.json");
  }
  if (command == "lemma") {
    const auto rep = ex::run_lemma_bounds(cfg);
    return finish(rep.passed(), g, "lemma", rep.to_json(), dir / "lemma.json");
  }
  if (command == "noise-amp") {
    const auto rep = ex::run_noise_amplification(cfg);
    return finish(rep.passed(), g, "noise-amp", rep.to_json(), dir / "noise_amp.json");
  }
  if (command == "sampling-probe") {
    const auto rep = ex::run_sampling_probe(cfg);
    return finish(rep.passed(), g, "sampling-probe", rep.to_json(), dir / "sampling_probe.json");
  }
  if (command == "certify-filters") {
    const auto rep = ex::run_filter_certification(cfg);
    return finish(rep.passed(), g, "certify-filters", rep.to_json(), dir / "certificates.json");
  }
  if (command == "geometry") {
    const auto rep = ex::run_geometry(cfg);
    return finish(rep.passed(), g, "geometry", rep.to_json(), dir / "geometry.json");
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral regularization experiments: weak-error rates, filter certificates and lemma checks"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "Experiment config (JSON, \"schema\": 1)");
  app.add_option("--out", g.out, "Output directory (overrides output_dir)");
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { g.seed = s; }, "Base seed");
  app.add_option_function<long long>("--trials", [&](const long long& t) { g.trials = t; }, "Monte Carlo trials");
  app.add_flag("--quiet", g.quiet, "Only set the exit code");

  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"rates", "Weak-error convergence study with log-log slope fit"},
      {"lemma", "Random sweep of the discrete residual and norm inequalities"},
      {"noise-amp", "Monte Carlo noise amplification against its bound"},
      {"sampling-probe", "Noise-free sampling inequality constants and schedule slope"},
      {"certify-filters", "Grid certificates of the filter constants"},
      {"geometry", "Fill and separation distances of the point schemes"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&command, n = std::string(name)] { command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(command, g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::IoError) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
