#pragma once

#include <cstdint>

// Deterministic random number generation.
//
// The generator is SplitMix64 (Steele, Lea & Flood's splittable generator
// with the fixed golden-ratio increment).  It is pinned here on purpose:
// shard decomposition of a simulation and optimizer restarts both derive
// independent streams from (seed, index), and results are only reproducible
// across machines and thread counts if the generator and the derivation rule
// never change.  Do not swap this out silently.

namespace seqctx {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection-free scaling (bound is tiny
  // everywhere this is used, so modulo bias is far below any tolerance that
  // matters; we still use the high bits via 128-bit multiply).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
};

// Stream seed for shard/restart `index` derived from a master seed.  The
// derivation runs the index through one SplitMix64 scramble so neighboring
// indices produce uncorrelated streams.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return g.next();
}

}  // namespace seqctx
