#pragma once
// The experiment engine: exact analytic scans, the stochastic Monte Carlo
// scan over pump pulses, the sinusoid fit that extracts fringe visibility,
// and the entanglement summary derived from it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swapsim/detection.hpp"
#include "swapsim/optics.hpp"
#include "swapsim/qstate.hpp"
#include "swapsim/source.hpp"

namespace swapsim {

enum class RunMode : std::uint8_t { analytic, monte_carlo };

constexpr const char* to_string(RunMode m) {
  return m == RunMode::analytic ? "analytic" : "monte_carlo";
}

struct ScanGrid {
  double beta_start = 0.0;
  double beta_end = 2.0 * std::numbers::pi;  // exclusive
  int points = 13;

  std::vector<double> betas() const;
  void validate() const;
};

struct TimingParams {
  double tau_ns = kBinSpacingNs;
  double rep_rate_mhz = kPulseRateMHz;

  void validate() const;
};

struct ExperimentConfig {
  RunMode mode = RunMode::analytic;
  std::int64_t pulses_per_point = 1000000;
  std::uint64_t seed = 20260815;

  SourceParams source;
  double alpha = 0.0;
  ScanGrid grid;
  TimingParams timing;
  ChannelParams channel_alice;
  ChannelParams channel_bob;
  DetectorBank detectors;

  // Worker threads for the Monte Carlo engine; results are independent of
  // this value.  Set from the environment by the CLI, never from files.
  int workers = 1;

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

struct FitResult {
  double visibility = 0.0;    // >= 0; the sign lives in phase_offset
  double sigma_v = 0.0;
  double amplitude = 0.0;     // mean level a of a(1 + V cos(alpha - beta + phi0))
  double phase_offset = 0.0;  // phi0 in (-pi, pi]
};

/// Weighted least-squares fit of counts(beta) to
/// a * (1 + V cos(alpha - beta + phi0)) with Poisson weights
/// (variance = max(count, 1)).  Needs at least 5 points; throws
/// std::runtime_error if the scan geometry makes the fit degenerate.
FitResult fit_visibility(std::span<const std::pair<double, double>> points, double alpha);

struct ScanPoint {
  double beta = 0.0;
  double conditioned = 0.0;    // coincidences in the central window, heralded
  double unconditioned = 0.0;  // central-window coincidences, herald ignored
  std::int64_t pulses = 0;
  std::array<double, 5> windows{};  // heralded events per arrival-time window -2..+2
  std::int64_t heralds = 0;
  std::int64_t bsa_cross_same_bin = 0;  // E and F clicks in the same bin
  std::int64_t excluded_multi_click = 0;
};

struct RunMeta {
  RunMode mode = RunMode::analytic;
  std::uint64_t seed = 0;
  std::int64_t pulses_per_point = 0;
  int workers = 1;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::optional<FitResult> conditioned_fit;
  std::optional<FitResult> unconditioned_fit;
  RunMeta meta;

  double total_conditioned() const;
  double total_unconditioned() const;
};

/// Entanglement summary for a fitted conditioned visibility.
struct Report {
  double visibility = 0.0;
  double sigma_v = 0.0;
  double visibility_clamped = 0.0;  // reported V limited to [0, 1]
  double f2 = 0.0;                  // fidelity to psi+ of the matching Werner state
  EntanglementClass classification = EntanglementClass::separable_compatible;
  double bell_sigma_distance = 0.0;  // (V - 1/sqrt(2)) / sigma_V
};

Report make_report(double visibility, double sigma_v);

/// Summary of a scan whose conditioned fit succeeded; throws
/// std::runtime_error when no fit is available.
Report summarize(const ScanResult& scan);

/// Exact single-pulse outcome table for one pair per source: the coherent
/// two-pair state pushed through both analyzers (kept plus lost ports) and
/// the BSA coupler, reduced to a cumulative distribution over detector
/// arrival patterns.  Total probability is 1 up to rounding.
struct QuantumOutcome {
  GateCounts arrivals;
  double cum = 0.0;  // cumulative probability up to and including this entry
};

struct QuantumEventTable {
  std::vector<QuantumOutcome> outcomes;
  double total = 0.0;

  const GateCounts& sample(double u) const;
};

QuantumEventTable build_single_pair_table(const SourceParams& source, double alpha,
                                          double beta);

/// Idealized exact scan (one pair per source, unit efficiency, no loss,
/// no darks, xi = 1): expected counts per pulse scaled by pulses_per_point.
ScanResult run_analytic(const ExperimentConfig& cfg);

/// Stochastic scan over pump pulses with multi-pair emission, partial
/// indistinguishability, channel loss, detector efficiency and darks.
ScanResult run_monte_carlo(const ExperimentConfig& cfg);

}  // namespace swapsim
