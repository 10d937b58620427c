#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace privagg {

// Simulation-grade randomness. Every experiment is reproducible from a 64-bit
// seed; nothing here is suitable for production key material.
using Rng = std::mt19937_64;

/// Derives an independent stream from a master seed and a path of stream
/// identifiers (trial, owner index, purpose tag, ...).
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 bits of resolution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

// Stream tags keep privatization draws independent of crypto draws, so the
// crypto-free and full pipelines see identical responses.
enum class StreamTag : std::uint64_t {
  population = 1,
  privatize = 2,
  crypto = 3,
  trial = 4,
};

}  // namespace privagg
