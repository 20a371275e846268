#pragma once

#include <cstdint>
#include <random>

namespace qbell {

// splitmix64 step; used to scramble seeds and derive independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

// Derived seed for substream `stream` of `seed`; deterministic, and distinct
// streams give independent-looking sequences.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

// Engine for substream `stream` of `seed`.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return make_engine(derive_seed(seed, stream));
}

}  // namespace qbell
