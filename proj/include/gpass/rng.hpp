#pragma once

#include <cstdint>

namespace gpass {

/// Counter-based stream generator, "splitmix64-v1".
///
/// Output i (1-based) of the stream with key K is mix(K + i * 0x9E3779B97F4A7C15),
/// where mix is the SplitMix64 finalizer (Steele, Lea & Flood 2014):
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// Stream keys are derived with `derive`, so stream (seed, a, b) is fixed by
/// its coordinates alone and trials can be generated in any order.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t key) : state_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix(mix(seed + kGamma) ^ mix(a + 2 * kGamma) ^ mix(b + 3 * kGamma) * kGamma);
  }

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// True with probability p (exactly never for p <= 0, always for p >= 1).
  constexpr bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace gpass
