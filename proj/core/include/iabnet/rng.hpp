#pragma once

#include <cmath>
#include <cstdint>

namespace iabnet {

// Deterministic, platform-independent randomness for the Monte Carlo
// estimators: xoshiro256++ streams seeded through SplitMix64.  Substream i
// of a seed is an independent stream, so realizations can be partitioned
// across any number of workers without changing a single draw.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RngStream {
public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  // Independent stream for realization `index` of a run seeded with `seed`.
  static RngStream substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed;
    std::uint64_t a = splitmix64_next(sm);
    std::uint64_t mix = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return RngStream(mix);
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential() { return -std::log1p(-uniform01()); }

  // Exact Poisson draw; large means are split into exact partial sums so the
  // product-of-uniforms method never underflows.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 400.0) {
      total += poisson_small(400.0);
      mean -= 400.0;
    }
    if (mean > 0.0) total += poisson_small(mean);
    return total;
  }

private:
  std::uint64_t poisson_small(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t s_[4];
};

}  // namespace iabnet
