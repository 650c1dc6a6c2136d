#pragma once
// Independent closed-form cross-check of the scan engine: enumerates every
// pulse class up to a pair-number cutoff, propagates amplitudes through the
// analyzers and the swapping coupler with its own transition tables, folds
// in channel loss and detector response analytically, and extracts the
// fringe visibility by discrete harmonic analysis.  Shares no propagation
// code with the Monte Carlo engine.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "swapsim/experiment.hpp"

namespace swapsim {

struct OracleResult {
  double visibility = 0.0;
  double phase_offset = 0.0;
  // Conditioned coincidence probability per pulse at each scan-grid beta.
  std::vector<std::pair<double, double>> conditioned_rate;
  double conditioned_rate_mean = 0.0;
  double unconditioned_rate = 0.0;  // central window, herald ignored (beta-averaged)
  double herald_rate = 0.0;
  double truncated_weight = 0.0;  // pulse probability beyond the pair cutoff
  bool truncation_warning = false;
};

/// Exact detectable-arrival-pattern distribution of the indistinguishable
/// one-pair-per-source pulse, derived from the oracle's own transition
/// tables.  Keys are pack_gate_counts patterns.  Exposed for cross checks.
std::map<std::uint64_t, double> oracle_quantum_pattern_distribution(const SourceParams& source,
                                                                    double alpha, double beta);

/// Expected per-pulse rates and fringe visibility for the configured
/// experiment, enumerating pair classes (n1, n2) with n1, n2 <= max_pairs.
/// Emits truncation_warning when the neglected pulse weight exceeds one
/// part in 1e3 of the weight of pulses carrying at least one pair.
OracleResult oracle_truncated_enumeration(const ExperimentConfig& cfg, int max_pairs = 2);

}  // namespace swapsim
