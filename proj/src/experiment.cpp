#include "swapsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace swapsim {

namespace {

constexpr std::uint64_t kPointStreamIndex = ~std::uint64_t{0};

// Pair counts beyond this are astronomically unlikely for the pump powers
// of interest and are clamped to keep per-pulse work bounded.
constexpr int kMaxPairsPerSource = 16;

double pair_number_pmf(const SourceParams& p, int n) {
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

}  // namespace

std::vector<double> ScanGrid::betas() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  const double step = (beta_end - beta_start) / points;
  for (int i = 0; i < points; ++i) out.push_back(beta_start + i * step);
  return out;
}

void ScanGrid::validate() const {
  if (points < 1 || points > 100000)
    throw std::invalid_argument("analyzers.scan_points must lie in [1, 100000]");
  if (!(beta_end > beta_start))
    throw std::invalid_argument("analyzers.beta_end must exceed analyzers.beta_start");
  if (!std::isfinite(beta_start) || !std::isfinite(beta_end))
    throw std::invalid_argument("analyzers beta range must be finite");
}

void TimingParams::validate() const {
  if (!(tau_ns > 0.0)) throw std::invalid_argument("timing.tau_ns must be > 0");
  if (!(rep_rate_mhz > 0.0)) throw std::invalid_argument("timing.rep_rate_mhz must be > 0");
}

void ExperimentConfig::validate() const {
  source.validate();
  grid.validate();
  timing.validate();
  channel_alice.validate("channel.alice");
  channel_bob.validate("channel.bob");
  detectors.validate();
  if (!std::isfinite(alpha)) throw std::invalid_argument("analyzers.alpha must be finite");
  if (pulses_per_point < 1)
    throw std::invalid_argument("run.pulses_per_point must be >= 1");
  if (workers < 1 || workers > 256) throw std::invalid_argument("worker count must lie in [1, 256]");
}

FitResult fit_visibility(std::span<const std::pair<double, double>> points, double alpha) {
  if (points.size() < 5)
    throw std::invalid_argument("visibility fit needs at least 5 scan points");

  // Linearized model: counts = p + q cos(alpha - beta) + r sin(alpha - beta).
  double m[3][3] = {};
  double b[3] = {};
  for (const auto& [beta, counts] : points) {
    const double x[3] = {1.0, std::cos(alpha - beta), std::sin(alpha - beta)};
    const double w = 1.0 / std::max(counts, 1.0);  // Poisson variance, floored
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += w * x[i] * x[j];
      b[i] += w * x[i] * counts;
    }
  }

  // Invert the 3x3 normal matrix.
  double inv[3][3];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double scale = std::max({std::fabs(m[0][0]), std::fabs(m[1][1]), std::fabs(m[2][2])});
  if (!(std::fabs(det) > 1e-12 * scale * scale * scale))
    throw std::runtime_error("degenerate scan: beta grid does not constrain the fringe fit");
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;

  const double p = inv[0][0] * b[0] + inv[0][1] * b[1] + inv[0][2] * b[2];
  const double q = inv[1][0] * b[0] + inv[1][1] * b[1] + inv[1][2] * b[2];
  const double r = inv[2][0] * b[0] + inv[2][1] * b[1] + inv[2][2] * b[2];

  FitResult fit;
  fit.amplitude = p;
  const double s = std::hypot(q, r);
  if (p <= 0.0 || s < 1e-300) {
    fit.visibility = 0.0;
    fit.phase_offset = 0.0;
    fit.sigma_v = p > 0.0 ? std::sqrt(std::max(0.0, 0.5 * (inv[1][1] + inv[2][2]))) / p : 0.0;
    return fit;
  }
  fit.visibility = s / p;
  fit.phase_offset = std::atan2(-r, q);
  // Delta-method propagation of the (p, q, r) covariance.
  const double g[3] = {-s / (p * p), q / (s * p), r / (s * p)};
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += g[i] * inv[i][j] * g[j];
  fit.sigma_v = std::sqrt(std::max(var, 0.0));
  return fit;
}

double ScanResult::total_conditioned() const {
  double t = 0.0;
  for (const auto& p : points) t += p.conditioned;
  return t;
}

double ScanResult::total_unconditioned() const {
  double t = 0.0;
  for (const auto& p : points) t += p.unconditioned;
  return t;
}

Report make_report(double visibility, double sigma_v) {
  Report r;
  r.visibility = visibility;
  r.sigma_v = sigma_v;
  r.visibility_clamped = std::clamp(visibility, 0.0, 1.0);
  r.f2 = fidelity_from_visibility(r.visibility_clamped);
  r.classification = classify_entanglement(r.visibility_clamped);
  if (sigma_v > 0.0) {
    r.bell_sigma_distance = (visibility - kBellVisibilityBound) / sigma_v;
  } else {
    r.bell_sigma_distance = visibility > kBellVisibilityBound
                                ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
  }
  return r;
}

Report summarize(const ScanResult& scan) {
  if (!scan.conditioned_fit)
    throw std::runtime_error("summary requires a completed conditioned-fringe fit");
  return make_report(scan.conditioned_fit->visibility, scan.conditioned_fit->sigma_v);
}

const GateCounts& QuantumEventTable::sample(double u) const {
  const double target = u * total;
  std::size_t lo = 0, hi = outcomes.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (outcomes[mid].cum <= target)
      lo = mid + 1;
    else
      hi = mid;
  }
  return outcomes[lo].arrivals;
}

QuantumEventTable build_single_pair_table(const SourceParams& source, double alpha,
                                          double beta) {
  StateVector state = tensor(ideal_pair_state(1, source), ideal_pair_state(2, source));
  state = analyzer_evolve_unitary(state, PhotonLabel::A, alpha);
  state = analyzer_evolve_unitary(state, PhotonLabel::D, beta);
  state = bsa_beamsplitter(state);

  // Merge occupancy outcomes that are indistinguishable at the detectors
  // (lost-port photons carry no detectable signal).
  std::map<std::uint64_t, std::pair<GateCounts, double>> merged;
  for (const OccupancyOutcome& o : arrival_distribution(state)) {
    GateCounts g;
    for (const Slot& s : o.slots) {
      const auto det = detector_of(s.mode);
      if (det) g.add(*det, s.bin);
    }
    auto it = merged.try_emplace(pack_gate_counts(g), std::pair{g, 0.0}).first;
    it->second.second += o.probability;
  }

  QuantumEventTable table;
  table.outcomes.reserve(merged.size());
  double cum = 0.0;
  for (const auto& [key, entry] : merged) {
    (void)key;
    cum += entry.second;
    table.outcomes.push_back(QuantumOutcome{entry.first, cum});
  }
  table.total = cum;
  if (std::fabs(table.total - 1.0) > 1e-9)
    throw std::runtime_error("single-pair outcome table does not sum to unit probability");
  return table;
}

namespace {

struct Tally {
  std::int64_t conditioned = 0;
  std::int64_t unconditioned = 0;
  std::int64_t heralds = 0;
  std::int64_t cross_same_bin = 0;
  std::int64_t excluded_multi = 0;
  std::array<std::int64_t, 5> windows{};

  void merge(const Tally& o) {
    conditioned += o.conditioned;
    unconditioned += o.unconditioned;
    heralds += o.heralds;
    cross_same_bin += o.cross_same_bin;
    excluded_multi += o.excluded_multi;
    for (int i = 0; i < 5; ++i) windows[i] += o.windows[i];
  }
};

// Classify one pulse's clicks into the shared tallies.
void tally_clicks(const ClickSet& cs, Tally& t) {
  bool herald = false;
  if (cs.clicks(DetectorId::bsa_e) == 1 && cs.clicks(DetectorId::bsa_f) == 1) {
    const int be = cs.single_bin(DetectorId::bsa_e);
    const int bf = cs.single_bin(DetectorId::bsa_f);
    if ((be == 0 && bf == 1) || (be == 1 && bf == 0))
      herald = true;
    else if (be == bf)
      ++t.cross_same_bin;
  }
  if (herald) ++t.heralds;

  const int ca = cs.clicks(DetectorId::alice);
  const int cb = cs.clicks(DetectorId::bob);
  if (ca > 1 || cb > 1) {
    ++t.excluded_multi;
    return;
  }
  if (ca == 1 && cb == 1) {
    const int d = window_of(cs.single_bin(DetectorId::alice), cs.single_bin(DetectorId::bob));
    if (herald) ++t.windows[d + 2];
    if (d == 0) {
      ++t.unconditioned;
      if (herald) ++t.conditioned;
    }
  }
}

// Classical propagation of one pair: the analyzer photon keeps its bin or
// is delayed one bin with probability 1/4 each (lost otherwise) and the
// BSA photon picks an output at random.
void route_classical_pair(GateCounts& g, int bin, DetectorId analyzer_det, RngStream& rng,
                          int& arrivals) {
  const double u = rng.uniform01();
  if (u < 0.25) {
    g.add(analyzer_det, bin);
    ++arrivals;
  } else if (u < 0.5) {
    g.add(analyzer_det, bin + 1);
    ++arrivals;
  }
  g.add(rng.bernoulli(0.5) ? DetectorId::bsa_e : DetectorId::bsa_f, bin);
  ++arrivals;
}

struct PulseContext {
  const ExperimentConfig* cfg;
  const QuantumEventTable* table;
  double p_late;
  double xi2;
  bool darks_zero;
  bool thin_alice;
  bool thin_bob;
};

void thin_gates(GateCounts& g, DetectorId det, double transmission, RngStream& rng) {
  for (int gate = 0; gate < kGatesPerPulse; ++gate) {
    const int n = g.n[static_cast<int>(det)][gate];
    if (n == 0) continue;
    int kept = 0;
    for (int i = 0; i < n; ++i) kept += rng.bernoulli(transmission) ? 1 : 0;
    g.n[static_cast<int>(det)][gate] = static_cast<std::uint8_t>(kept);
  }
}

void simulate_pulse_with_counts(int n1, int n2, const PulseContext& ctx, RngStream& rng,
                                Tally& tally) {
  GateCounts g;
  int arrivals = 0;

  // With a pair on each side, one cross-source pair interferes coherently
  // with probability xi^2; any remaining pairs (and every pair of a fully
  // distinguishable pulse) are routed classically below.
  if (n1 >= 1 && n2 >= 1 && (ctx.xi2 >= 1.0 || rng.bernoulli(ctx.xi2))) {
    g = ctx.table->sample(rng.uniform01());
    for (int d = 0; d < 4; ++d)
      for (int gate = 0; gate < kGatesPerPulse; ++gate) arrivals += g.n[d][gate];
    --n1;
    --n2;
  }
  n1 = std::min(n1, kMaxPairsPerSource);
  n2 = std::min(n2, kMaxPairsPerSource);
  std::int8_t bins1[kMaxPairsPerSource], bins2[kMaxPairsPerSource];
  for (int i = 0; i < n1; ++i) bins1[i] = rng.bernoulli(ctx.p_late) ? 1 : 0;
  for (int i = 0; i < n2; ++i) bins2[i] = rng.bernoulli(ctx.p_late) ? 1 : 0;
  for (int i = 0; i < n1; ++i)
    route_classical_pair(g, bins1[i], DetectorId::alice, rng, arrivals);
  for (int i = 0; i < n2; ++i) {
    // Source 2 feeds the BSA with photon C and Bob with photon D.
    g.add(rng.bernoulli(0.5) ? DetectorId::bsa_e : DetectorId::bsa_f, bins2[i]);
    ++arrivals;
    const double u = rng.uniform01();
    if (u < 0.25) {
      g.add(DetectorId::bob, bins2[i]);
      ++arrivals;
    } else if (u < 0.5) {
      g.add(DetectorId::bob, bins2[i] + 1);
      ++arrivals;
    }
  }

  if (ctx.darks_zero && arrivals == 0) return;
  if (ctx.thin_alice) thin_gates(g, DetectorId::alice, ctx.cfg->channel_alice.transmission, rng);
  if (ctx.thin_bob) thin_gates(g, DetectorId::bob, ctx.cfg->channel_bob.transmission, rng);

  const ClickSet cs = sample_clicks(g, ctx.cfg->detectors, rng);
  tally_clicks(cs, tally);
}

// Conditional pair-count sampler for the fast path: the distribution of
// (n1, n2) restricted to pulses that can produce any click when there are
// no dark counts (everything except (0,0), (1,0) and (0,1)).
struct ClassCdf {
  std::vector<std::pair<std::pair<int, int>, double>> entries;  // ((n1, n2), cum)
  double total = 0.0;
  double p_interesting = 0.0;

  std::pair<int, int> sample(double u) const {
    const double target = u * total;
    std::size_t lo = 0, hi = entries.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (entries[mid].second <= target)
        lo = mid + 1;
      else
        hi = mid;
    }
    return entries[lo].first;
  }
};

ClassCdf build_class_cdf(const SourceParams& p) {
  ClassCdf cdf;
  int nmax = 4;
  while (pair_number_pmf(p, nmax) > 1e-18 && nmax < 200) ++nmax;
  std::vector<double> pmf(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) pmf[n] = pair_number_pmf(p, n);
  double cum = 0.0;
  for (int n1 = 0; n1 <= nmax; ++n1) {
    for (int n2 = 0; n2 <= nmax; ++n2) {
      const bool boring = (n1 == 0 && n2 == 0) || (n1 == 1 && n2 == 0) || (n1 == 0 && n2 == 1);
      if (boring) continue;
      const double w = pmf[n1] * pmf[n2];
      if (w <= 0.0) continue;
      cum += w;
      cdf.entries.push_back({{n1, n2}, cum});
    }
  }
  cdf.total = cum;
  cdf.p_interesting = cum;
  return cdf;
}

}  // namespace

ScanResult run_analytic(const ExperimentConfig& cfg) {
  cfg.validate();
  ScanResult res;
  res.meta = RunMeta{RunMode::analytic, cfg.seed, cfg.pulses_per_point, cfg.workers};

  for (const double beta : cfg.grid.betas()) {
    const QuantumEventTable table = build_single_pair_table(cfg.source, cfg.alpha, beta);
    ScanPoint pt;
    pt.beta = beta;
    pt.pulses = cfg.pulses_per_point;
    double herald_p = 0.0;
    double prev = 0.0;
    for (const QuantumOutcome& o : table.outcomes) {
      const double prob = o.cum - prev;
      prev = o.cum;
      // Ideal detection: every arrival clicks.
      ClickSet cs;
      for (int d = 0; d < 4; ++d)
        for (int gate = 0; gate < kGatesPerPulse; ++gate)
          if (o.arrivals.n[d][gate] > 0) cs.mask[d] |= static_cast<std::uint8_t>(1u << gate);
      const bool herald = bsa_classify(cs);
      if (herald) herald_p += prob;
      if (cs.clicks(DetectorId::alice) == 1 && cs.clicks(DetectorId::bob) == 1) {
        const int d = window_of(cs.single_bin(DetectorId::alice), cs.single_bin(DetectorId::bob));
        const double scaled = prob * static_cast<double>(cfg.pulses_per_point);
        if (herald) pt.windows[d + 2] += scaled;
        if (d == 0) {
          pt.unconditioned += scaled;
          if (herald) pt.conditioned += scaled;
        }
      }
    }
    pt.heralds = std::llround(herald_p * static_cast<double>(cfg.pulses_per_point));
    res.points.push_back(pt);
  }

  if (res.points.size() >= 5) {
    std::vector<std::pair<double, double>> cond, uncond;
    for (const auto& p : res.points) {
      cond.push_back({p.beta, p.conditioned});
      uncond.push_back({p.beta, p.unconditioned});
    }
    res.conditioned_fit = fit_visibility(cond, cfg.alpha);
    res.unconditioned_fit = fit_visibility(uncond, cfg.alpha);
  }
  return res;
}

ScanResult run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  ScanResult res;
  res.meta = RunMeta{RunMode::monte_carlo, cfg.seed, cfg.pulses_per_point, cfg.workers};

  const std::vector<double> betas = cfg.grid.betas();
  const bool darks_zero =
      cfg.detectors[DetectorId::bsa_e].dark_prob_per_gate == 0.0 &&
      cfg.detectors[DetectorId::bsa_f].dark_prob_per_gate == 0.0 &&
      cfg.detectors[DetectorId::alice].dark_prob_per_gate == 0.0 &&
      cfg.detectors[DetectorId::bob].dark_prob_per_gate == 0.0;
  const bool fast = darks_zero && cfg.source.distribution != PairNumberDistribution::one_pair;

  ClassCdf class_cdf;
  if (fast) class_cdf = build_class_cdf(cfg.source);

  for (std::uint32_t k = 0; k < betas.size(); ++k) {
    const QuantumEventTable table = build_single_pair_table(cfg.source, cfg.alpha, betas[k]);

    PulseContext ctx;
    ctx.cfg = &cfg;
    ctx.table = &table;
    ctx.p_late = cfg.source.c1 * cfg.source.c1;
    ctx.xi2 = cfg.source.xi * cfg.source.xi;
    ctx.darks_zero = darks_zero;
    ctx.thin_alice = cfg.channel_alice.transmission < 1.0;
    ctx.thin_bob = cfg.channel_bob.transmission < 1.0;

    std::int64_t todo = cfg.pulses_per_point;
    if (fast) {
      RngStream point_rng(cfg.seed, k, kPointStreamIndex);
      todo = sample_binomial(cfg.pulses_per_point, class_cdf.p_interesting, point_rng);
    }

    const auto worker_fn = [&](std::int64_t lo, std::int64_t hi, Tally& out) {
      Tally t;
      PoissonSampler poisson(cfg.source.mu);
      ThermalSampler thermal(cfg.source.mu);
      for (std::int64_t i = lo; i < hi; ++i) {
        RngStream rng(cfg.seed, k, static_cast<std::uint64_t>(i));
        int n1, n2;
        if (fast) {
          const auto [a, b] = class_cdf.sample(rng.uniform01());
          n1 = a;
          n2 = b;
        } else {
          switch (cfg.source.distribution) {
            case PairNumberDistribution::poisson:
              n1 = poisson(rng);
              n2 = poisson(rng);
              break;
            case PairNumberDistribution::thermal:
              n1 = thermal(rng);
              n2 = thermal(rng);
              break;
            case PairNumberDistribution::one_pair:
            default:
              n1 = n2 = 1;
              break;
          }
        }
        simulate_pulse_with_counts(n1, n2, ctx, rng, t);
      }
      out = t;
    };

    Tally total;
    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || todo < 4096) {
      worker_fn(0, todo, total);
    } else {
      std::vector<Tally> parts(static_cast<std::size_t>(workers));
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = todo * w / workers;
        const std::int64_t hi = todo * (w + 1) / workers;
        threads.emplace_back(worker_fn, lo, hi, std::ref(parts[static_cast<std::size_t>(w)]));
      }
      for (auto& th : threads) th.join();
      for (const Tally& part : parts) total.merge(part);
    }

    ScanPoint pt;
    pt.beta = betas[k];
    pt.pulses = cfg.pulses_per_point;
    pt.conditioned = static_cast<double>(total.conditioned);
    pt.unconditioned = static_cast<double>(total.unconditioned);
    for (int i = 0; i < 5; ++i) pt.windows[i] = static_cast<double>(total.windows[i]);
    pt.heralds = total.heralds;
    pt.bsa_cross_same_bin = total.cross_same_bin;
    pt.excluded_multi_click = total.excluded_multi;
    res.points.push_back(pt);
  }

  if (res.points.size() >= 5) {
    std::vector<std::pair<double, double>> cond, uncond;
    for (const auto& p : res.points) {
      cond.push_back({p.beta, p.conditioned});
      uncond.push_back({p.beta, p.unconditioned});
    }
    res.conditioned_fit = fit_visibility(cond, cfg.alpha);
    res.unconditioned_fit = fit_visibility(uncond, cfg.alpha);
  }
  return res;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto key = [](const ExperimentConfig& c) {
    return std::tuple(c.mode, c.pulses_per_point, c.seed, c.source.distribution, c.source.mu,
                      c.source.delta, c.source.c0, c.source.c1, c.source.xi, c.alpha,
                      c.grid.beta_start, c.grid.beta_end, c.grid.points, c.timing.tau_ns,
                      c.timing.rep_rate_mhz, c.channel_alice.length_km,
                      c.channel_alice.transmission, c.channel_alice.latency_us,
                      c.channel_bob.length_km, c.channel_bob.transmission,
                      c.channel_bob.latency_us);
  };
  if (key(a) != key(b)) return false;
  for (auto id : kAllDetectors) {
    if (a.detectors[id].efficiency != b.detectors[id].efficiency) return false;
    if (a.detectors[id].dark_prob_per_gate != b.detectors[id].dark_prob_per_gate) return false;
  }
  return true;
}

}  // namespace swapsim
