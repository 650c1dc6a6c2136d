#pragma once
// Counter-based random number generation (Philox 4x32-10).  Every pulse of
// every scan point gets its own stream keyed by (master seed, point index,
// pulse index), so results do not depend on how pulses are sharded across
// worker threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace swapsim {

namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// One block of Philox 4x32 with 10 rounds.
inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

}  // namespace philox

// A deterministic stream of random numbers.  The 128-bit counter holds
// (block index, point index, pulse index lo, pulse index hi); the 64-bit
// key is the master seed, so distinct (seed, point, pulse) triples yield
// disjoint streams by construction.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t point_index, std::uint64_t pulse_index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        base_{0, point_index, static_cast<std::uint32_t>(pulse_index),
              static_cast<std::uint32_t>(pulse_index >> 32)} {}

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  // Standard normal deviate (Box-Muller, cosine branch).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  void refill() {
    std::array<std::uint32_t, 4> ctr = base_;
    ctr[0] = block_;
    ++block_;
    const auto out = philox::block(ctr, key_);
    for (int i = 0; i < 4; ++i) buf_[i] = out[i];
    have_ = 4;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;
  std::uint32_t block_ = 0;
  std::uint32_t buf_[4] = {};
  int have_ = 0;
};

// Poisson sampler.  Direct inversion-by-multiplication for small means,
// rounded Gaussian approximation for large ones.
class PoissonSampler {
 public:
  explicit PoissonSampler(double mean) : mean_(mean), exp_neg_(std::exp(-mean)) {}

  int operator()(RngStream& rng) const {
    if (mean_ <= 0.0) return 0;
    if (mean_ <= 30.0) {
      int n = 0;
      double t = rng.uniform01();
      while (t > exp_neg_) {
        ++n;
        t *= rng.uniform01();
      }
      return n;
    }
    const double x = mean_ + std::sqrt(mean_) * rng.normal();
    return x < 0.0 ? 0 : static_cast<int>(x + 0.5);
  }

  double mean() const { return mean_; }

 private:
  double mean_;
  double exp_neg_;
};

// Geometric (thermal / single-mode Bose-Einstein) pair-number sampler with
// the given mean: P(n) = mu^n / (1 + mu)^(n + 1).
class ThermalSampler {
 public:
  explicit ThermalSampler(double mean) : mean_(mean) {}

  int operator()(RngStream& rng) const {
    if (mean_ <= 0.0) return 0;
    const double q = mean_ / (1.0 + mean_);  // success probability per step
    const double u = 1.0 - rng.uniform01();  // in (0, 1]
    return static_cast<int>(std::floor(std::log(u) / std::log(q)));
  }

 private:
  double mean_;
};

// Binomial(n, p) sample.  Exact Bernoulli loop for small n, Poisson or
// rounded Gaussian approximation for the huge-n regimes used by the
// empty-pulse fast path.
inline std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 100000) {
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < n; ++i) k += rng.bernoulli(p) ? 1 : 0;
    return k;
  }
  const double mean = static_cast<double>(n) * p;
  const double var = mean * (1.0 - p);
  if (var >= 900.0) {
    const double x = mean + std::sqrt(var) * rng.normal();
    if (x < 0.0) return 0;
    if (x > static_cast<double>(n)) return n;
    return static_cast<std::int64_t>(x + 0.5);
  }
  // n huge, n*p moderate: binomial ~ Poisson(n*p).
  return PoissonSampler(mean)(rng);
}

}  // namespace swapsim
