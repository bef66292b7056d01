#pragma once

#include <cstdint>
#include <random>

namespace v2x {

using Rng = std::mt19937_64;

/// Named per-subsystem random streams. Adding draws to one stream never
/// shifts the draws of another.
enum class Stream : std::uint64_t {
  placement = 1,
  shadowing = 2,
  scheduler = 3,
  oneshot = 4,
  congestion = 5,
  phy = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic 64-bit mix of several words.
std::uint64_t hash_words(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0, std::uint64_t d = 0);

/// Engine for stream `s`, sub-indexed by `index` (typically a vehicle id).
Rng make_stream(std::uint64_t master_seed, Stream s, std::uint64_t index = 0);

/// Uniform double in [0, 1) from the top 53 bits of `bits`.
double unit_from_bits(std::uint64_t bits);

/// Standard normal variate that is a pure function of `key`.
double hashed_normal(std::uint64_t key);

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace v2x
