#include "swapsim/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace swapsim {

namespace {

double pair_pmf(const SourceParams& p, int n) {
  switch (p.distribution) {
    case PairNumberDistribution::poisson: {
      double v = std::exp(-p.mu);
      for (int i = 1; i <= n; ++i) v *= p.mu / i;
      return v;
    }
    case PairNumberDistribution::thermal: {
      const double q = p.mu / (1.0 + p.mu);
      return std::pow(q, n) / (1.0 + p.mu);
    }
    case PairNumberDistribution::one_pair:
      return n == 1 ? 1.0 : 0.0;
  }
  return 0.0;
}

// Analyzer transition for a photon entering its long/short interferometer
// at time bin b: the kept port takes |b> -> (|b> + e^{i phase} |b+1>)/2,
// the orthogonal (lost) port takes |b> -> (|b> - e^{i phase} |b+1>)/2.
// Slots 0..2 are kept@bin, slots 3..5 lost@(slot-3).
struct SlotAmp {
  int slot;
  cplx amp;
};

std::array<SlotAmp, 4> analyzer_options(int b, double phase) {
  const cplx late = std::polar(0.5, phase);
  return {SlotAmp{b, 0.5}, SlotAmp{b + 1, late}, SlotAmp{3 + b, 0.5}, SlotAmp{3 + b + 1, -late}};
}

// Occupancy amplitudes of the 50:50 swapping coupler for one photon from
// each source entering at bins (b1, b2), derived from
// b -> (e + i f)/sqrt(2), c -> (i e + f)/sqrt(2) acting on creation
// operators.  Same-bin inputs bunch; the antisymmetric different-bin
// combination is the only one leaving one photon in each output.
struct BsaAmp {
  std::array<std::uint8_t, 2> ne{};  // photons on E at bins 0, 1
  std::array<std::uint8_t, 2> nf{};
  cplx amp;
};

std::vector<BsaAmp> bsa_options(int b1, int b2) {
  const cplx i_unit(0.0, 1.0);
  std::vector<BsaAmp> out;
  if (b1 == b2) {
    BsaAmp both_e;
    both_e.ne[b1] = 2;
    both_e.amp = i_unit / std::numbers::sqrt2;
    BsaAmp both_f;
    both_f.nf[b1] = 2;
    both_f.amp = i_unit / std::numbers::sqrt2;
    out = {both_e, both_f};
  } else {
    BsaAmp ee, ef, fe, ff;
    ee.ne[b1] = 1;
    ee.ne[b2] = 1;
    ee.amp = i_unit * 0.5;
    ef.ne[b1] = 1;
    ef.nf[b2] = 1;
    ef.amp = 0.5;
    fe.nf[b1] = 1;
    fe.ne[b2] = 1;
    fe.amp = -0.5;
    ff.nf[b1] = 1;
    ff.nf[b2] = 1;
    ff.amp = i_unit * 0.5;
    out = {ee, ef, fe, ff};
  }
  return out;
}

using PatternDist = std::map<std::uint64_t, double>;

std::uint64_t merge_keys(std::uint64_t ka, std::uint64_t kb) {
  const GateCounts ga = unpack_gate_counts(ka);
  GateCounts g = unpack_gate_counts(kb);
  for (int d = 0; d < 4; ++d)
    for (int gate = 0; gate < kGatesPerPulse; ++gate)
      g.n[d][gate] = static_cast<std::uint8_t>(g.n[d][gate] + ga.n[d][gate]);
  return pack_gate_counts(g);
}

// Convolution of two independent arrival-pattern distributions.
PatternDist convolve(const PatternDist& a, const PatternDist& b) {
  PatternDist out;
  for (const auto& [ka, pa] : a)
    for (const auto& [kb, pb] : b) out[merge_keys(ka, kb)] += pa * pb;
  return out;
}

// Distinguishable propagation of one pair: both photons share the pulse
// bin; the analyzer-side photon survives in either output bin with
// probability 1/4 each, the partner exits E or F with probability 1/2.
PatternDist classical_pair_dist(const SourceParams& src, DetectorId analyzer_det) {
  PatternDist out;
  const double pb[2] = {src.c0 * src.c0, src.c1 * src.c1};
  for (int b = 0; b < 2; ++b) {
    for (int partner = 0; partner < 2; ++partner) {
      const DetectorId bsa = partner == 0 ? DetectorId::bsa_e : DetectorId::bsa_f;
      for (int route = 0; route < 3; ++route) {
        GateCounts g;
        g.add(bsa, b);
        double pr = pb[b] * 0.5;
        if (route == 0) {
          g.add(analyzer_det, b);
          pr *= 0.25;
        } else if (route == 1) {
          g.add(analyzer_det, b + 1);
          pr *= 0.25;
        } else {
          pr *= 0.5;
        }
        if (pr > 0.0) out[pack_gate_counts(g)] += pr;
      }
    }
  }
  return out;
}

struct EffectiveBank {
  double eta[4];
  double dark[4];
};

struct RateTerms {
  double herald = 0.0;    // P(valid early/late cross click on E and F)
  double pair_sum = 0.0;  // P(exactly one Alice and one Bob click, same bin)
};

RateTerms rate_terms(std::uint64_t key, const EffectiveBank& bank) {
  const GateCounts g = unpack_gate_counts(key);
  double q[4][kGatesPerPulse];
  for (int d = 0; d < 4; ++d)
    for (int gate = 0; gate < kGatesPerPulse; ++gate)
      q[d][gate] = 1.0 - (1.0 - bank.dark[d]) * std::pow(1.0 - bank.eta[d], g.n[d][gate]);

  double only[4][kGatesPerPulse];
  for (int d = 0; d < 4; ++d)
    for (int gate = 0; gate < kGatesPerPulse; ++gate) {
      double v = q[d][gate];
      for (int other = 0; other < kGatesPerPulse; ++other)
        if (other != gate) v *= 1.0 - q[d][other];
      only[d][gate] = v;
    }

  constexpr int e = static_cast<int>(DetectorId::bsa_e);
  constexpr int f = static_cast<int>(DetectorId::bsa_f);
  constexpr int a = static_cast<int>(DetectorId::alice);
  constexpr int b = static_cast<int>(DetectorId::bob);
  RateTerms t;
  t.herald = only[e][0] * only[f][1] + only[e][1] * only[f][0];
  for (int gate = 0; gate < kGatesPerPulse; ++gate) t.pair_sum += only[a][gate] * only[b][gate];
  return t;
}

}  // namespace

std::map<std::uint64_t, double> oracle_quantum_pattern_distribution(const SourceParams& source,
                                                                    double alpha, double beta) {
  const cplx s1[2] = {source.c0, std::polar(source.c1, source.delta)};
  const cplx s2[2] = {source.c0, -std::polar(source.c1, source.delta)};

  // Coherent amplitude per orthogonal final state (Alice slot, Bob slot,
  // coupler occupancy); different labeled paths landing on the same final
  // state interfere.
  std::map<std::uint64_t, cplx> amps;
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      const cplx pair_amp = s1[b1] * s2[b2];
      if (std::norm(pair_amp) == 0.0) continue;
      const auto bsa = bsa_options(b1, b2);
      for (const SlotAmp& a : analyzer_options(b1, alpha)) {
        for (const SlotAmp& d : analyzer_options(b2, beta)) {
          const cplx ad = pair_amp * a.amp * d.amp;
          for (const BsaAmp& o : bsa) {
            const std::uint64_t okey = (static_cast<std::uint64_t>(o.ne[0]) << 12) |
                                       (static_cast<std::uint64_t>(o.ne[1]) << 8) |
                                       (static_cast<std::uint64_t>(o.nf[0]) << 4) |
                                       static_cast<std::uint64_t>(o.nf[1]);
            const std::uint64_t key =
                (static_cast<std::uint64_t>(a.slot * 6 + d.slot) << 16) | okey;
            amps[key] += ad * o.amp;
          }
        }
      }
    }
  }

  std::map<std::uint64_t, double> out;
  double total = 0.0;
  for (const auto& [key, amp] : amps) {
    const double prob = std::norm(amp);
    if (prob <= 0.0) continue;
    total += prob;
    const int slots = static_cast<int>(key >> 16);
    const int a_slot = slots / 6;
    const int d_slot = slots % 6;
    GateCounts g;
    if (a_slot < 3) g.add(DetectorId::alice, a_slot);
    if (d_slot < 3) g.add(DetectorId::bob, d_slot);
    g.add(DetectorId::bsa_e, 0, static_cast<int>((key >> 12) & 0xF));
    g.add(DetectorId::bsa_e, 1, static_cast<int>((key >> 8) & 0xF));
    g.add(DetectorId::bsa_f, 0, static_cast<int>((key >> 4) & 0xF));
    g.add(DetectorId::bsa_f, 1, static_cast<int>(key & 0xF));
    out[pack_gate_counts(g)] += prob;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::runtime_error("oracle amplitude enumeration lost probability");
  return out;
}

OracleResult oracle_truncated_enumeration(const ExperimentConfig& cfg, int max_pairs) {
  cfg.validate();
  if (max_pairs < 1 || max_pairs > 6)
    throw std::invalid_argument("oracle pair cutoff must lie in [1, 6]");

  EffectiveBank bank;
  for (auto id : kAllDetectors) {
    bank.eta[static_cast<int>(id)] = cfg.detectors[id].efficiency;
    bank.dark[static_cast<int>(id)] = cfg.detectors[id].dark_prob_per_gate;
  }
  // Channel loss commutes with threshold detection and folds into the
  // efficiency: P(click) = 1 - (1 - T*eta)^n.
  bank.eta[static_cast<int>(DetectorId::alice)] *= cfg.channel_alice.transmission;
  bank.eta[static_cast<int>(DetectorId::bob)] *= cfg.channel_bob.transmission;

  std::vector<double> pmf(static_cast<std::size_t>(max_pairs) + 1);
  for (int n = 0; n <= max_pairs; ++n) pmf[n] = pair_pmf(cfg.source, n);

  // Per-source n-pair distinguishable arrival distributions.
  std::vector<PatternDist> dist1(pmf.size()), dist2(pmf.size());
  dist1[0][0] = 1.0;
  dist2[0][0] = 1.0;
  const PatternDist pair1 = classical_pair_dist(cfg.source, DetectorId::alice);
  const PatternDist pair2 = classical_pair_dist(cfg.source, DetectorId::bob);
  for (int n = 1; n <= max_pairs; ++n) {
    dist1[n] = convolve(dist1[n - 1], pair1);
    dist2[n] = convolve(dist2[n - 1], pair2);
  }

  const double xi2 = cfg.source.xi * cfg.source.xi;

  // Beta-independent part: every class propagated distinguishably, with the
  // coherent fraction removed from classes holding a pair on each side.
  double cond_flat = 0.0, uncond_flat = 0.0, herald_flat = 0.0, weight_covered = 0.0;
  for (int n1 = 0; n1 <= max_pairs; ++n1) {
    for (int n2 = 0; n2 <= max_pairs; ++n2) {
      double w = pmf[n1] * pmf[n2];
      weight_covered += w;
      if (n1 >= 1 && n2 >= 1) w *= 1.0 - xi2;
      if (w <= 0.0) continue;
      for (const auto& [ka, pa] : dist1[n1])
        for (const auto& [kb, pb] : dist2[n2]) {
          const RateTerms t = rate_terms(merge_keys(ka, kb), bank);
          const double wp = w * pa * pb;
          cond_flat += wp * t.herald * t.pair_sum;
          uncond_flat += wp * t.pair_sum;
          herald_flat += wp * t.herald;
        }
    }
  }

  // Coherent share: one cross-source pair interferes with full amplitudes;
  // the remaining pairs of its class ride along as distinguishable
  // spectators.  Their class-weighted arrival patterns fold into a single
  // distribution convolved with the interfering pair's pattern.
  PatternDist spectators;
  for (int n1 = 1; n1 <= max_pairs; ++n1) {
    for (int n2 = 1; n2 <= max_pairs; ++n2) {
      const double w = pmf[n1] * pmf[n2];
      if (w <= 0.0) continue;
      for (const auto& [ka, pa] : dist1[n1 - 1])
        for (const auto& [kb, pb] : dist2[n2 - 1])
          spectators[merge_keys(ka, kb)] += w * pa * pb;
    }
  }

  OracleResult res;
  res.truncated_weight = std::max(0.0, 1.0 - weight_covered);
  res.truncation_warning = res.truncated_weight > 1e-3 * (1.0 - pmf[0] * pmf[0]);

  // Beta-dependent coherent contribution.
  struct QuantumTerms {
    double cond = 0.0, uncond = 0.0, herald = 0.0;
  };
  const auto quantum_terms = [&](double beta) {
    QuantumTerms sum;
    if (xi2 <= 0.0 || spectators.empty()) return sum;
    for (const auto& [kq, pq] : oracle_quantum_pattern_distribution(cfg.source, cfg.alpha, beta)) {
      for (const auto& [ks, ps] : spectators) {
        const RateTerms t = rate_terms(merge_keys(kq, ks), bank);
        const double p = pq * ps;
        sum.cond += p * t.herald * t.pair_sum;
        sum.uncond += p * t.pair_sum;
        sum.herald += p * t.herald;
      }
    }
    sum.cond *= xi2;
    sum.uncond *= xi2;
    sum.herald *= xi2;
    return sum;
  };

  // The conditioned rate is an exact first harmonic in beta, so eight
  // uniform samples recover the fringe parameters exactly.
  constexpr int kHarmonicPoints = 8;
  double mean = 0.0, uc = 0.0, vs = 0.0, uncond_mean = 0.0, herald_mean = 0.0;
  for (int k = 0; k < kHarmonicPoints; ++k) {
    const double beta = 2.0 * std::numbers::pi * k / kHarmonicPoints;
    const QuantumTerms q = quantum_terms(beta);
    const double y = cond_flat + q.cond;
    mean += y;
    uc += y * std::cos(beta);
    vs += y * std::sin(beta);
    uncond_mean += uncond_flat + q.uncond;
    herald_mean += herald_flat + q.herald;
  }
  mean /= kHarmonicPoints;
  uc *= 2.0 / kHarmonicPoints;
  vs *= 2.0 / kHarmonicPoints;
  res.conditioned_rate_mean = mean;
  res.unconditioned_rate = uncond_mean / kHarmonicPoints;
  res.herald_rate = herald_mean / kHarmonicPoints;
  if (mean > 0.0) {
    res.visibility = std::hypot(uc, vs) / mean;
    if (res.visibility > 1e-300)
      res.phase_offset = wrap_angle(std::atan2(vs, uc) - cfg.alpha);
  }

  for (const double beta : cfg.grid.betas())
    res.conditioned_rate.push_back({beta, cond_flat + quantum_terms(beta).cond});

  return res;
}

}  // namespace swapsim
