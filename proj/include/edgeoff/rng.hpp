#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace edgeoff {

// Deterministic RNG with hand-rolled transforms so results are identical
// across platforms and independent of libstdc++'s distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform double in [0, 1) with 53 random bits
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; caches the second deviate
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // avoid log(0)
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;  // 2*pi
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Poisson by CDF inversion (exact for the means used here); falls back to a
  // rounded normal for very large means where exp(-mean) underflows.
  std::int64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > 600.0) {
      const double x = normal(mean, std::sqrt(mean));
      return x < 0.0 ? 0 : static_cast<std::int64_t>(std::llround(x));
    }
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::int64_t k = 0;
    const std::int64_t cap =
        static_cast<std::int64_t>(mean + 40.0 * std::sqrt(mean) + 16.0);
    while (u >= cdf && k < cap) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n == 0");
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// splitmix64 finalizer; used to derive decorrelated per-component seeds
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix_seed(mix_seed(base ^ mix_seed(stream)) + index);
}

// named streams so call sites don't collide by accident
namespace seed_stream {
constexpr std::uint64_t deployment = 0x01;
constexpr std::uint64_t channels = 0x02;
constexpr std::uint64_t arrivals = 0x03;
constexpr std::uint64_t solver = 0x04;
constexpr std::uint64_t cpu_random = 0x05;
constexpr std::uint64_t policy_init = 0x06;
constexpr std::uint64_t train_episode = 0x07;
constexpr std::uint64_t validation = 0x08;
constexpr std::uint64_t ppo_shuffle = 0x09;
}  // namespace seed_stream

}  // namespace edgeoff
