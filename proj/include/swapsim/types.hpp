#pragma once
// Core domain types for the time-bin entanglement swapping simulator:
// photon labels, spatial modes, time bins, and packed basis kets.

#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swapsim {

using cplx = std::complex<double>;

// Pulse-to-pulse time-bin spacing and pump repetition rate.
inline constexpr double kBinSpacingNs = 1.2;
inline constexpr double kPulseRateMHz = 75.0;

// Visibility thresholds for a Werner state: above 1/3 the partial-transpose
// criterion certifies entanglement, above 1/sqrt(2) a CHSH inequality can be
// violated.  Both bounds are strict.
inline constexpr double kPeresVisibilityBound = 1.0 / 3.0;
inline const double kBellVisibilityBound = 1.0 / std::numbers::sqrt2;

// Amplitudes below this magnitude are dropped from state vectors.
inline constexpr double kAmplitudePrune = 1e-15;

// The four photons of one swapping event.  A and D are the outer photons
// that travel to the remote analyzers; B and C are the inner photons that
// meet at the Bell-state analyzer.
enum class PhotonLabel : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<PhotonLabel, 4> kAllLabels = {
    PhotonLabel::A, PhotonLabel::B, PhotonLabel::C, PhotonLabel::D};

enum class WavelengthRole : std::uint8_t { signal_1550, idler_1310 };

constexpr WavelengthRole wavelength_role(PhotonLabel l) {
  return (l == PhotonLabel::A || l == PhotonLabel::D) ? WavelengthRole::signal_1550
                                                      : WavelengthRole::idler_1310;
}

constexpr const char* to_string(PhotonLabel l) {
  switch (l) {
    case PhotonLabel::A: return "A";
    case PhotonLabel::B: return "B";
    case PhotonLabel::C: return "C";
    case PhotonLabel::D: return "D";
  }
  return "?";
}

// Spatial modes a photon can occupy.  Each label starts on its own source
// line; the Bell-state analyzer coupler maps lines B and C onto outputs E
// and F; each analyzer has an undetected exit port, modeled as a per-label
// "lost" mode so that the optical evolution stays unitary.
enum class Mode : std::uint8_t {
  line_a = 0,
  line_b = 1,
  line_c = 2,
  line_d = 3,
  bsa_e = 4,
  bsa_f = 5,
  lost_a = 6,
  lost_b = 7,
  lost_c = 8,
  lost_d = 9,
};

constexpr Mode home_mode(PhotonLabel l) { return static_cast<Mode>(static_cast<int>(l)); }

constexpr Mode lost_mode(PhotonLabel l) {
  return static_cast<Mode>(static_cast<int>(Mode::lost_a) + static_cast<int>(l));
}

// One single-photon slot: a spatial mode and a discrete time bin.  Bins 0
// and 1 are the source emission bins; an analyzer long arm can delay a
// photon into bin 2.
struct Slot {
  Mode mode;
  std::int8_t bin;

  friend constexpr auto operator<=>(const Slot&, const Slot&) = default;
};

// A basis ket assigns a slot to each photon label of the state's label set.
// Packed one byte per label (high nibble mode, low nibble bin, 0xFF absent)
// so kets order and compare as a single integer.
class BasisKet {
 public:
  constexpr BasisKet() = default;

  bool has(PhotonLabel l) const { return byte(l) != 0xFF; }

  Slot slot(PhotonLabel l) const {
    const std::uint8_t b = byte(l);
    if (b == 0xFF) throw std::out_of_range(std::string("no slot for photon ") + to_string(l));
    return Slot{static_cast<Mode>(b >> 4), static_cast<std::int8_t>(b & 0xF)};
  }

  int bin(PhotonLabel l) const { return slot(l).bin; }
  Mode mode(PhotonLabel l) const { return slot(l).mode; }

  BasisKet& set(PhotonLabel l, Slot s) {
    const auto m = static_cast<std::uint8_t>(s.mode);
    if (s.bin < 0 || s.bin > 14) throw std::out_of_range("time bin out of range");
    set_byte(l, static_cast<std::uint8_t>((m << 4) | (s.bin & 0xF)));
    return *this;
  }

  BasisKet& set(PhotonLabel l, int bin) { return set(l, Slot{home_mode(l), static_cast<std::int8_t>(bin)}); }

  BasisKet with(PhotonLabel l, Slot s) const {
    BasisKet k = *this;
    k.set(l, s);
    return k;
  }

  BasisKet without(PhotonLabel l) const {
    BasisKet k = *this;
    k.set_byte(l, 0xFF);
    return k;
  }

  std::uint8_t label_mask() const {
    std::uint8_t m = 0;
    for (auto l : kAllLabels)
      if (has(l)) m |= static_cast<std::uint8_t>(1u << static_cast<int>(l));
    return m;
  }

  std::uint32_t packed() const { return bits_; }

  friend constexpr auto operator<=>(const BasisKet&, const BasisKet&) = default;

 private:
  std::uint8_t byte(PhotonLabel l) const {
    return static_cast<std::uint8_t>(bits_ >> (8 * static_cast<int>(l)));
  }
  void set_byte(PhotonLabel l, std::uint8_t v) {
    const int sh = 8 * static_cast<int>(l);
    bits_ = (bits_ & ~(0xFFu << sh)) | (static_cast<std::uint32_t>(v) << sh);
  }

  std::uint32_t bits_ = 0xFFFFFFFFu;
};

// Convenience builder for kets whose photons sit on their home lines.
inline BasisKet make_ket(std::initializer_list<std::pair<PhotonLabel, int>> bins) {
  BasisKet k;
  for (const auto& [l, b] : bins) k.set(l, b);
  return k;
}

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0) r += two_pi;
  if (r == two_pi) r = 0.0;
  return r;
}

// Smallest absolute difference between two angles on the circle.
inline double angle_distance(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, two_pi - d);
}

}  // namespace swapsim
