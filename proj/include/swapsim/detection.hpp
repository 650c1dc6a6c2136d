#pragma once
// Gated threshold detectors with efficiency and dark counts, the heralding
// rule of the Bell-state analyzer, and per-pulse coincidence assembly.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swapsim/rng.hpp"
#include "swapsim/types.hpp"

namespace swapsim {

enum class DetectorId : std::uint8_t { bsa_e = 0, bsa_f = 1, alice = 2, bob = 3 };

inline constexpr std::array<DetectorId, 4> kAllDetectors = {
    DetectorId::bsa_e, DetectorId::bsa_f, DetectorId::alice, DetectorId::bob};

constexpr const char* to_string(DetectorId d) {
  switch (d) {
    case DetectorId::bsa_e: return "bsa_e";
    case DetectorId::bsa_f: return "bsa_f";
    case DetectorId::alice: return "alice";
    case DetectorId::bob: return "bob";
  }
  return "?";
}

// Each detector opens one gate per time bin; bins 0..2 are reachable after
// an analyzer long arm.
inline constexpr int kGatesPerPulse = 3;

struct DetectorParams {
  double efficiency = 1.0;          // per-photon detection probability
  double dark_prob_per_gate = 0.0;  // spurious click probability per gate

  void validate(const char* name) const;
};

struct DetectorBank {
  std::array<DetectorParams, 4> det{};

  const DetectorParams& operator[](DetectorId id) const { return det[static_cast<int>(id)]; }
  DetectorParams& operator[](DetectorId id) { return det[static_cast<int>(id)]; }
  void validate() const;
};

/// Which detector monitors a spatial mode; lost modes and the pre-coupler
/// lines B/C are unmonitored.
std::optional<DetectorId> detector_of(Mode mode);

// Photon arrivals per detector gate for one pulse.
struct GateCounts {
  std::array<std::array<std::uint8_t, kGatesPerPulse>, 4> n{};

  void add(DetectorId d, int bin, int count = 1) {
    n[static_cast<int>(d)][bin] = static_cast<std::uint8_t>(n[static_cast<int>(d)][bin] + count);
  }
  int count(DetectorId d, int bin) const { return n[static_cast<int>(d)][bin]; }
};

/// Canonical 48-bit key for an arrival pattern (4 bits per gate, detector
/// major); usable as a map key while counts stay below 16.
constexpr std::uint64_t pack_gate_counts(const GateCounts& g) {
  std::uint64_t key = 0;
  for (int d = 0; d < 4; ++d)
    for (int gate = 0; gate < kGatesPerPulse; ++gate) key = (key << 4) | g.n[d][gate];
  return key;
}

constexpr GateCounts unpack_gate_counts(std::uint64_t key) {
  GateCounts g;
  for (int d = 3; d >= 0; --d)
    for (int gate = kGatesPerPulse - 1; gate >= 0; --gate) {
      g.n[d][gate] = static_cast<std::uint8_t>(key & 0xF);
      key >>= 4;
    }
  return g;
}

// Clicks of one pulse as per-detector gate bitmasks (bit i = gate of bin i).
struct ClickSet {
  std::array<std::uint8_t, 4> mask{};
  std::array<std::uint8_t, 4> dark_mask{};  // clicks with no detected photon

  int clicks(DetectorId d) const { return std::popcount(static_cast<unsigned>(mask[static_cast<int>(d)])); }
  bool clicked(DetectorId d, int bin) const { return mask[static_cast<int>(d)] & (1u << bin); }
  // Bin of the single click; only meaningful when clicks(d) == 1.
  int single_bin(DetectorId d) const { return std::countr_zero(static_cast<unsigned>(mask[static_cast<int>(d)])); }
};

struct ClickRecord {
  DetectorId detector;
  std::int8_t time_bin;
  std::int64_t pulse_index;
  bool is_dark;
};

/// Threshold detection: a gate with one or more photons clicks with
/// probability 1 - (1 - efficiency)^n, and every gate can additionally
/// fire as a dark count.
ClickSet sample_clicks(const GateCounts& arrivals, const DetectorBank& bank, RngStream& rng);

/// Record-producing wrapper over sample_clicks.
std::vector<ClickRecord> detect(const std::vector<std::pair<DetectorId, int>>& arrivals,
                                const DetectorBank& bank, std::int64_t pulse_index,
                                RngStream& rng);

/// Herald rule of the Bell-state analyzer: exactly one click on E and one
/// on F, in different time bins, one early (bin 0) and one late (bin 1).
bool bsa_classify(const ClickSet& clicks);
bool bsa_classify(const std::vector<ClickRecord>& clicks);

/// Arrival-time window of an Alice/Bob coincidence: bin(A) - bin(D).
int window_of(int bin_alice, int bin_bob);

struct CoincidenceEvent {
  std::int64_t pulse_index = 0;
  bool bsa_success = false;
  // Defined iff Alice and Bob each registered exactly one click.
  std::optional<int> delta_tau_ad;
  bool multi_alice = false;  // more than one Alice click: excluded from fringes
  bool multi_bob = false;
  std::vector<ClickRecord> clicks;
};

CoincidenceEvent coincidence_assemble(std::vector<ClickRecord> clicks,
                                      std::int64_t pulse_index);

}  // namespace swapsim
