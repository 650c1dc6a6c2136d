#pragma once
// Pulsed down-conversion pair sources.  Each pump pulse drives two
// independent crystals; source 1 feeds photons A and B, source 2 feeds C
// and D with the pump phase offset by pi.

#include <array>
#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "swapsim/qstate.hpp"
#include "swapsim/rng.hpp"
#include "swapsim/types.hpp"

namespace swapsim {

enum class PairNumberDistribution : std::uint8_t { poisson, thermal, one_pair };

constexpr const char* to_string(PairNumberDistribution d) {
  switch (d) {
    case PairNumberDistribution::poisson: return "poisson";
    case PairNumberDistribution::thermal: return "thermal";
    case PairNumberDistribution::one_pair: return "one_pair";
  }
  return "?";
}

// Mean pair number per pulse chosen so that P(at least one pair) = 6%.
inline const double kDefaultMeanPairs = -std::log(0.94);

struct SourceParams {
  PairNumberDistribution distribution = PairNumberDistribution::poisson;
  double mu = kDefaultMeanPairs;  // mean pairs per source per pulse
  double delta = 0.0;             // pump interferometer phase
  double c0 = 0.70710678118654752440;  // early-bin amplitude
  double c1 = 0.70710678118654752440;  // late-bin amplitude
  double xi = 1.0;                // photon indistinguishability at the BSA

  void validate() const;  // throws std::invalid_argument naming the field
};

// One emitted pair in the classical bookkeeping: the shared time bin of
// both photons and the pump phase the late bin would carry.
struct PairEmission {
  std::int8_t bin;
  double phase;
};

// Sampled emission record for one pump pulse.
struct PulseSample {
  std::int64_t pulse_index = 0;
  std::vector<PairEmission> source1;  // pairs on the A/B crystal
  std::vector<PairEmission> source2;  // pairs on the C/D crystal

  int n_pairs_1() const { return static_cast<int>(source1.size()); }
  int n_pairs_2() const { return static_cast<int>(source2.size()); }
};

// Photon multiplicities per label and bin for pulses that are handled
// classically (no pair, or more than one pair on a source).
struct MultiPairEvent {
  std::array<std::vector<std::int8_t>, 4> bins;  // indexed by PhotonLabel

  const std::vector<std::int8_t>& photons(PhotonLabel l) const {
    return bins[static_cast<int>(l)];
  }
};

using PulseOutcome = std::variant<StateVector, MultiPairEvent>;

/// Ideal single-pair state of one source: c0 |0,0> + e^{i delta} c1 |1,1>
/// on (A, B) for source 1; source 2 carries the opposite pump sign,
/// c0 |0,0> - e^{i delta} c1 |1,1> on (C, D).
StateVector ideal_pair_state(int source_id, const SourceParams& params);

/// Draw the pair numbers and per-pair bins for one pulse.
PulseSample sample_pulse(const SourceParams& params, std::int64_t pulse_index, RngStream& rng);

/// Exactly one pair on each source yields the full coherent two-pair state
/// (the sampled bins are ignored); anything else yields a MultiPairEvent
/// that downstream stages propagate classically.
PulseOutcome pulse_to_state(const PulseSample& sample, const SourceParams& params);

}  // namespace swapsim
