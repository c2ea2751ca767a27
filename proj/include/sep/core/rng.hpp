#pragma once

#include <cstdint>
#include <random>

namespace sep {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// SplitMix64 output function; a bijective counter-based mixer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of replica `index` under master seed `master`: splitmix64(master ^ index).
constexpr Seed replica_seed(Seed master, std::uint64_t index) { return splitmix64(master ^ index); }

/// Independent named sub-stream of a seed (measure sample, reference sample,
/// dynamics, ...).
constexpr Seed substream(Seed seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(0xd1b54a32d192ed03ULL ^ stream));
}

inline Rng make_rng(Seed seed) { return Rng(seed); }

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace sep
