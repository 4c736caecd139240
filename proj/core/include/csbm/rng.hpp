#pragma once

#include <cstdint>
#include <random>

namespace csbm {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for (cell, trial) under a master seed. Depends only on its arguments, so the
/// trial lineage is independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell,
                                    std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ cell) ^ (trial * 0xd1b54a32d192ed03ULL));
}

/// Child seed for a named sub-stream of an existing seed.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace csbm
