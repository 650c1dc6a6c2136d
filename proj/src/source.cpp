#include "swapsim/source.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swapsim {

void SourceParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("source.mu must be a finite value >= 0");
  if (!std::isfinite(delta)) throw std::invalid_argument("source.delta must be finite");
  if (!(c0 >= 0.0) || !(c1 >= 0.0))
    throw std::invalid_argument("source.c0 and source.c1 must be >= 0");
  if (std::fabs(c0 * c0 + c1 * c1 - 1.0) > 1e-9)
    throw std::invalid_argument("source.c0 and source.c1 must satisfy c0^2 + c1^2 = 1");
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("source.xi must lie in [0, 1]");
}

StateVector ideal_pair_state(int source_id, const SourceParams& params) {
  if (source_id != 1 && source_id != 2)
    throw std::invalid_argument("source id must be 1 or 2");
  const PhotonLabel first = source_id == 1 ? PhotonLabel::A : PhotonLabel::C;
  const PhotonLabel second = source_id == 1 ? PhotonLabel::B : PhotonLabel::D;
  const double sign = source_id == 1 ? 1.0 : -1.0;

  StateVector s(static_cast<std::uint8_t>((1u << static_cast<int>(first)) |
                                          (1u << static_cast<int>(second))));
  s.add(make_ket({{first, 0}, {second, 0}}), params.c0);
  s.add(make_ket({{first, 1}, {second, 1}}), sign * std::polar(params.c1, params.delta));
  return s;
}

namespace {

int sample_pair_count(const SourceParams& p, RngStream& rng) {
  switch (p.distribution) {
    case PairNumberDistribution::poisson:
      return PoissonSampler(p.mu)(rng);
    case PairNumberDistribution::thermal:
      return ThermalSampler(p.mu)(rng);
    case PairNumberDistribution::one_pair:
      return 1;
  }
  return 0;
}

void fill_pairs(std::vector<PairEmission>& out, int n, double late_phase,
                const SourceParams& p, RngStream& rng) {
  const double p_late = p.c1 * p.c1;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::int8_t bin = rng.bernoulli(p_late) ? 1 : 0;
    out.push_back(PairEmission{bin, late_phase});
  }
}

}  // namespace

PulseSample sample_pulse(const SourceParams& params, std::int64_t pulse_index, RngStream& rng) {
  PulseSample s;
  s.pulse_index = pulse_index;
  const int n1 = sample_pair_count(params, rng);
  const int n2 = sample_pair_count(params, rng);
  fill_pairs(s.source1, n1, params.delta, params, rng);
  fill_pairs(s.source2, n2, wrap_angle(params.delta + std::numbers::pi), params, rng);
  return s;
}

PulseOutcome pulse_to_state(const PulseSample& sample, const SourceParams& params) {
  if (sample.n_pairs_1() == 1 && sample.n_pairs_2() == 1)
    return tensor(ideal_pair_state(1, params), ideal_pair_state(2, params));

  MultiPairEvent ev;
  for (const auto& pair : sample.source1) {
    ev.bins[static_cast<int>(PhotonLabel::A)].push_back(pair.bin);
    ev.bins[static_cast<int>(PhotonLabel::B)].push_back(pair.bin);
  }
  for (const auto& pair : sample.source2) {
    ev.bins[static_cast<int>(PhotonLabel::C)].push_back(pair.bin);
    ev.bins[static_cast<int>(PhotonLabel::D)].push_back(pair.bin);
  }
  return ev;
}

}  // namespace swapsim
