#pragma once
// Linear optics: the unbalanced analyzer interferometers on the outer
// photons, the 50/50 coupler of the Bell-state analyzer, fiber channel
// loss, and the bosonic occupancy readout that turns a labeled state into
// detection-outcome probabilities.

#include <cstdint>
#include <vector>

#include "swapsim/qstate.hpp"
#include "swapsim/rng.hpp"
#include "swapsim/types.hpp"

namespace swapsim {

struct AnalyzerSettings {
  double alpha = 0.0;  // phase of Alice's analyzer (photon A)
  double beta = 0.0;   // phase of Bob's analyzer (photon D)
};

struct ChannelParams {
  double length_km = 1.1;
  double transmission = 0.945;  // survival probability end to end
  double latency_us = 5.0;      // classical readout delay, recorded only

  void validate(const char* name) const;
};

/// Detected output port of an unbalanced interferometer with phase `phase`
/// applied to photon `label`:  |i> -> (|i> + e^{i phase} |i+1>)/2.  The
/// result is sub-normalized; the missing norm is the photon leaving through
/// the unmonitored port (squared norm halves per fresh photon).
StateVector analyzer_evolve(const StateVector& s, PhotonLabel label, double phase);

/// Same interferometer kept unitary: the unmonitored port appears as the
/// label's lost mode, |i> -> (|i> + e^{i phase}|i+1>)/2 on the kept mode
/// plus (|i> - e^{i phase}|i+1>)/2 on the lost mode.
StateVector analyzer_evolve_unitary(const StateVector& s, PhotonLabel label, double phase);

/// 50/50 coupler of the Bell-state analyzer.  Photons on line B map to
/// (E + iF)/sqrt(2), photons on line C to (iE + F)/sqrt(2); time bins are
/// untouched.  Requires B and C present on their home lines.  Unitary.
StateVector bsa_beamsplitter(const StateVector& s);

/// One mode-occupancy detection outcome: the sorted multiset of occupied
/// slots and its probability.
struct OccupancyOutcome {
  std::vector<Slot> slots;
  double probability = 0.0;
};

/// Distribution over photon-number outcomes per (mode, bin) slot.  Photons
/// sharing a slot space are treated as identical bosons, so amplitudes of
/// label permutations landing on the same occupancy add coherently; two
/// same-bin photons never split across E and F while one early and one
/// late photon take all four E/F assignments with probability 1/4 each.
std::vector<OccupancyOutcome> arrival_distribution(const StateVector& s);

/// Thin a photon bundle through a lossy channel: each of `n_photons`
/// survives independently with probability channel.transmission.  Loss
/// commutes with the linear optics, so rates scale while fringe visibility
/// is untouched.
int apply_transmission(int n_photons, const ChannelParams& channel, RngStream& rng);

/// Convenience overload for explicit arrival lists.
std::vector<Slot> apply_transmission(const std::vector<Slot>& arrivals,
                                     const ChannelParams& channel, RngStream& rng);

}  // namespace swapsim
