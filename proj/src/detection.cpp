#include "swapsim/detection.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace swapsim {

void DetectorParams::validate(const char* name) const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw std::invalid_argument(std::string(name) + ".efficiency must lie in [0, 1]");
  if (!(dark_prob_per_gate >= 0.0 && dark_prob_per_gate < 1.0))
    throw std::invalid_argument(std::string(name) + ".dark_prob_per_gate must lie in [0, 1)");
}

void DetectorBank::validate() const {
  for (auto id : kAllDetectors) (*this)[id].validate(to_string(id));
}

std::optional<DetectorId> detector_of(Mode mode) {
  switch (mode) {
    case Mode::line_a: return DetectorId::alice;
    case Mode::line_d: return DetectorId::bob;
    case Mode::bsa_e: return DetectorId::bsa_e;
    case Mode::bsa_f: return DetectorId::bsa_f;
    default: return std::nullopt;
  }
}

ClickSet sample_clicks(const GateCounts& arrivals, const DetectorBank& bank, RngStream& rng) {
  ClickSet out;
  for (int d = 0; d < 4; ++d) {
    const DetectorParams& p = bank.det[d];
    std::uint8_t mask = 0;
    std::uint8_t dark = 0;
    for (int g = 0; g < kGatesPerPulse; ++g) {
      const int n = arrivals.n[d][g];
      bool photon_click = false;
      if (n > 0) {
        if (p.efficiency >= 1.0)
          photon_click = true;
        else if (p.efficiency > 0.0)
          photon_click = rng.bernoulli(1.0 - std::pow(1.0 - p.efficiency, n));
      }
      bool dark_click = false;
      if (p.dark_prob_per_gate > 0.0) dark_click = rng.bernoulli(p.dark_prob_per_gate);
      if (photon_click || dark_click) {
        mask |= static_cast<std::uint8_t>(1u << g);
        if (!photon_click) dark |= static_cast<std::uint8_t>(1u << g);
      }
    }
    out.mask[d] = mask;
    out.dark_mask[d] = dark;
  }
  return out;
}

std::vector<ClickRecord> detect(const std::vector<std::pair<DetectorId, int>>& arrivals,
                                const DetectorBank& bank, std::int64_t pulse_index,
                                RngStream& rng) {
  GateCounts counts;
  for (const auto& [det, bin] : arrivals) {
    if (bin < 0 || bin >= kGatesPerPulse) throw std::out_of_range("arrival bin outside gates");
    counts.add(det, bin);
  }
  const ClickSet clicks = sample_clicks(counts, bank, rng);
  std::vector<ClickRecord> records;
  for (int d = 0; d < 4; ++d) {
    for (int g = 0; g < kGatesPerPulse; ++g) {
      if (clicks.mask[d] & (1u << g)) {
        records.push_back(ClickRecord{static_cast<DetectorId>(d), static_cast<std::int8_t>(g),
                                      pulse_index,
                                      static_cast<bool>(clicks.dark_mask[d] & (1u << g))});
      }
    }
  }
  return records;
}

bool bsa_classify(const ClickSet& clicks) {
  if (clicks.clicks(DetectorId::bsa_e) != 1 || clicks.clicks(DetectorId::bsa_f) != 1)
    return false;
  const int be = clicks.single_bin(DetectorId::bsa_e);
  const int bf = clicks.single_bin(DetectorId::bsa_f);
  return (be == 0 && bf == 1) || (be == 1 && bf == 0);
}

bool bsa_classify(const std::vector<ClickRecord>& clicks) {
  ClickSet set;
  for (const ClickRecord& c : clicks)
    set.mask[static_cast<int>(c.detector)] |= static_cast<std::uint8_t>(1u << c.time_bin);
  return bsa_classify(set);
}

int window_of(int bin_alice, int bin_bob) { return bin_alice - bin_bob; }

CoincidenceEvent coincidence_assemble(std::vector<ClickRecord> clicks,
                                      std::int64_t pulse_index) {
  CoincidenceEvent ev;
  ev.pulse_index = pulse_index;
  int n_alice = 0, n_bob = 0;
  int bin_alice = -1, bin_bob = -1;
  for (const ClickRecord& c : clicks) {
    if (c.detector == DetectorId::alice) {
      ++n_alice;
      bin_alice = c.time_bin;
    } else if (c.detector == DetectorId::bob) {
      ++n_bob;
      bin_bob = c.time_bin;
    }
  }
  ev.bsa_success = bsa_classify(clicks);
  ev.multi_alice = n_alice > 1;
  ev.multi_bob = n_bob > 1;
  if (n_alice == 1 && n_bob == 1) ev.delta_tau_ad = window_of(bin_alice, bin_bob);
  ev.clicks = std::move(clicks);
  return ev;
}

}  // namespace swapsim
