// Command-line front end: load a config, apply overrides, run the selected
// engine and print the summary.  Exit codes: 0 success, 2 configuration or
// usage error, 3 runtime failure.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "swapsim/config.hpp"
#include "swapsim/oracle.hpp"
#include "swapsim/report.hpp"
#include "swapsim/version.hpp"

namespace {

int run_selftest() {
  using namespace swapsim;

  // Ideal analytic scan: unit conditioned visibility, flat unconditioned.
  ExperimentConfig cfg;
  cfg.pulses_per_point = 1000000;
  const ScanResult scan = run_analytic(cfg);
  if (!scan.conditioned_fit || std::fabs(scan.conditioned_fit->visibility - 1.0) > 1e-9) {
    std::cerr << "selftest: analytic conditioned visibility is not 1\n";
    return 3;
  }
  if (!scan.unconditioned_fit || scan.unconditioned_fit->visibility > 1e-9) {
    std::cerr << "selftest: analytic unconditioned scan is not flat\n";
    return 3;
  }

  // Partial indistinguishability: closed-form V = xi^2 for single pairs.
  ExperimentConfig part;
  part.source.distribution = PairNumberDistribution::one_pair;
  part.source.xi = 0.8;
  const OracleResult oracle = oracle_truncated_enumeration(part);
  if (std::fabs(oracle.visibility - 0.64) > 1e-12) {
    std::cerr << "selftest: closed-form check expected V = 0.64, got "
              << format_double(oracle.visibility) << "\n";
    return 3;
  }

  std::cout << "selftest: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace swapsim;

  CLI::App app{"Time-bin entanglement swapping simulator"};
  app.set_version_flag("--version", std::string("swapsim ") + kVersion);

  std::string config_path;
  std::string mode_name;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::int64_t pulses = 0;
  int scan_points = 0;
  bool selftest = false;

  app.add_option("-c,--config", config_path, "Experiment configuration file (INI)")
      ->check(CLI::ExistingFile);
  app.add_option("--mode", mode_name, "Engine: analytic or mc")
      ->check(CLI::IsMember({"analytic", "mc", "monte_carlo"}));
  app.add_option("--seed", seed, "Override the random seed");
  app.add_option("--pulses", pulses, "Override pulses per scan point")
      ->check(CLI::PositiveNumber);
  app.add_option("--scan-points", scan_points, "Override the number of beta points")
      ->check(CLI::PositiveNumber);
  app.add_option("-o,--out", out_dir, "Directory for scan.csv and summary.ini");
  app.add_flag("--selftest", selftest, "Run built-in consistency checks and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (selftest) return run_selftest();

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config(config_path);
    if (app.count("--mode") > 0)
      cfg.mode = mode_name == "analytic" ? RunMode::analytic : RunMode::monte_carlo;
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (app.count("--pulses") > 0) cfg.pulses_per_point = pulses;
    if (app.count("--scan-points") > 0) cfg.grid.points = scan_points;
    if (const char* env = std::getenv("SWAPSIM_WORKERS")) {
      char* end = nullptr;
      const long w = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || w < 1 || w > 256) {
        std::cerr << "error: SWAPSIM_WORKERS must be an integer in [1, 256]\n";
        return 2;
      }
      cfg.workers = static_cast<int>(w);
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const ScanResult scan =
        cfg.mode == RunMode::analytic ? run_analytic(cfg) : run_monte_carlo(cfg);
    const std::string summary = render_summary(scan, cfg);
    std::cout << summary;
    if (!out_dir.empty()) emit_results(out_dir, cfg, scan);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
