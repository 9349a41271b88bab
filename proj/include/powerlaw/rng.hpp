#pragma once

#include <cmath>
#include <cstdint>

namespace powerlaw {

/// Name of the generator algorithm, recorded in run metadata so results can
/// be reproduced across machines.
inline constexpr const char* kRngAlgorithm = "splitmix64";

/// Finalizer of splitmix64 (Steele/Lea/Flood). Full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// splitmix64: counter-based, so a stream is fully determined by its seed and
/// independent streams can be derived by hashing (seed, key...) tuples.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Derives the seed of an independent substream from (seed, a, b).
/// Used for per-pair / per-edge streams: generation order is irrelevant.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b) {
  std::uint64_t h = mix64(seed ^ 0x4cf5ad432745937full);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

/// Poisson count by CDF inversion of a single uniform. Exact, monotone in u.
/// Intended for mean <= ~30 (below that exp(-mean) is well away from 0).
inline std::int64_t poisson_invert(double u, double mean) {
  if (u < 1.0 - mean) return 0;  // u < 1-mean <= exp(-mean)
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0) break;  // u in the far tail; cdf saturated
  }
  return k;
}

/// Poisson with arbitrary mean: sum of independent chunks with mean <= 16,
/// each drawn exactly by inversion.
inline std::int64_t poisson(SplitMix64& rng, double mean) {
  std::int64_t total = 0;
  while (mean > 16.0) {
    total += poisson_invert(rng.uniform(), 16.0);
    mean -= 16.0;
  }
  if (mean > 0.0) total += poisson_invert(rng.uniform(), mean);
  return total;
}

}  // namespace powerlaw
