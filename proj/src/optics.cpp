#include "swapsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace swapsim {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kInvSqrt2 = 0.70710678118654752440;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

StateVector analyzer_apply(const StateVector& s, PhotonLabel label, double phase,
                           bool keep_lost_port) {
  require(s.has_label(label), "analyzer applied to a label absent from the state");
  const cplx late = std::polar(0.5, phase);
  StateVector out(s.labels());
  for (const auto& [ket, amp] : s.amplitudes()) {
    const Slot in = ket.slot(label);
    const auto next_bin = static_cast<std::int8_t>(in.bin + 1);
    out.add(ket.with(label, in), amp * 0.5);
    out.add(ket.with(label, Slot{in.mode, next_bin}), amp * late);
    if (keep_lost_port) {
      const Mode lost = lost_mode(label);
      out.add(ket.with(label, Slot{lost, in.bin}), amp * 0.5);
      out.add(ket.with(label, Slot{lost, next_bin}), -amp * late);
    }
  }
  return out;
}

}  // namespace

void ChannelParams::validate(const char* name) const {
  if (!(length_km >= 0.0))
    throw std::invalid_argument(std::string(name) + ".length_km must be >= 0");
  if (!(transmission > 0.0 && transmission <= 1.0))
    throw std::invalid_argument(std::string(name) + ".transmission must lie in (0, 1]");
  if (!(latency_us >= 0.0))
    throw std::invalid_argument(std::string(name) + ".latency_us must be >= 0");
}

StateVector analyzer_evolve(const StateVector& s, PhotonLabel label, double phase) {
  return analyzer_apply(s, label, phase, false);
}

StateVector analyzer_evolve_unitary(const StateVector& s, PhotonLabel label, double phase) {
  return analyzer_apply(s, label, phase, true);
}

StateVector bsa_beamsplitter(const StateVector& s) {
  require(s.has_label(PhotonLabel::B) || s.has_label(PhotonLabel::C),
          "beamsplitter requires photons B and C");
  // B -> (E + iF)/sqrt(2), C -> (iE + F)/sqrt(2).
  const std::array<std::pair<Mode, cplx>, 2> b_out = {
      std::pair{Mode::bsa_e, cplx{kInvSqrt2, 0.0}}, std::pair{Mode::bsa_f, kI * kInvSqrt2}};
  const std::array<std::pair<Mode, cplx>, 2> c_out = {
      std::pair{Mode::bsa_e, kI * kInvSqrt2}, std::pair{Mode::bsa_f, cplx{kInvSqrt2, 0.0}}};

  StateVector out(s.labels());
  const auto split = [&](const StateVector& in, PhotonLabel l, Mode home,
                         const std::array<std::pair<Mode, cplx>, 2>& ports) {
    if (!in.has_label(l)) return in;
    StateVector next(in.labels());
    for (const auto& [ket, amp] : in.amplitudes()) {
      const Slot slot = ket.slot(l);
      require(slot.mode == home, "beamsplitter inputs must arrive on lines B and C");
      for (const auto& [m, a] : ports) {
        BasisKet k = ket;
        k.set(l, Slot{m, slot.bin});
        next.add(k, amp * a);
      }
    }
    return next;
  };
  out = split(split(s, PhotonLabel::B, Mode::line_b, b_out), PhotonLabel::C, Mode::line_c, c_out);
  return out;
}

std::vector<OccupancyOutcome> arrival_distribution(const StateVector& s) {
  struct Accum {
    std::vector<Slot> slots;
    cplx amp;
  };
  // Key: slots of the ket sorted into a canonical multiset.
  std::map<std::uint64_t, Accum> groups;
  for (const auto& [ket, amp] : s.amplitudes()) {
    std::vector<Slot> slots;
    slots.reserve(4);
    for (auto l : kAllLabels)
      if (ket.has(l)) slots.push_back(ket.slot(l));
    std::sort(slots.begin(), slots.end());
    std::uint64_t key = 0;
    for (const Slot& sl : slots)
      key = (key << 8) | (static_cast<std::uint64_t>(static_cast<std::uint8_t>(sl.mode)) << 4) |
            static_cast<std::uint8_t>(sl.bin);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) it->second.slots = slots;
    it->second.amp += amp;
  }

  std::vector<OccupancyOutcome> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    (void)key;
    // Bosonic occupancy amplitude: sqrt(prod n_slot!) times the coherent
    // sum of labeled amplitudes landing on this occupancy.
    double fact = 1.0;
    std::size_t i = 0;
    while (i < g.slots.size()) {
      std::size_t j = i;
      int run = 0;
      while (j < g.slots.size() && g.slots[j] == g.slots[i]) {
        ++run;
        ++j;
      }
      for (int n = 2; n <= run; ++n) fact *= n;
      i = j;
    }
    const double prob = std::norm(g.amp) * fact;
    if (prob <= 0.0) continue;
    out.push_back(OccupancyOutcome{std::move(g.slots), prob});
  }
  return out;
}

int apply_transmission(int n_photons, const ChannelParams& channel, RngStream& rng) {
  if (channel.transmission >= 1.0) return n_photons;
  int kept = 0;
  for (int i = 0; i < n_photons; ++i) kept += rng.bernoulli(channel.transmission) ? 1 : 0;
  return kept;
}

std::vector<Slot> apply_transmission(const std::vector<Slot>& arrivals,
                                     const ChannelParams& channel, RngStream& rng) {
  if (channel.transmission >= 1.0) return arrivals;
  std::vector<Slot> kept;
  kept.reserve(arrivals.size());
  for (const Slot& s : arrivals)
    if (rng.bernoulli(channel.transmission)) kept.push_back(s);
  return kept;
}

}  // namespace swapsim
