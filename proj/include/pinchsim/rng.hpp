#pragma once

// Deterministic splittable PRNG. Every Monte Carlo trial gets its own
// splitmix64 stream derived from (seed, trial), so results depend only on the
// plan, never on worker count or scheduling.

#include <cstdint>

namespace pinchsim {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += kGoldenGamma;
    return mix64(state);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Per-trial sub-stream: the seed is finalized once and each trial index lands
// on its own Weyl offset, keeping streams statistically independent.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return SplitMix64{mix64(seed ^ kGoldenGamma) + trial * 0xD1B54A32D192ED03ULL};
}

}  // namespace pinchsim
