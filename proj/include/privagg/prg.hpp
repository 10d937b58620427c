#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "privagg/bitstring.hpp"
#include "privagg/rng.hpp"

namespace privagg {

inline constexpr std::size_t kSeedBits = 128;

/// A lambda-bit PRG seed. The all-zero seed marks an empty slot in an FSS key.
struct Seed {
  std::array<std::uint8_t, kSeedBits / 8> bytes{};

  bool is_zero() const;
  static Seed random_nonzero(Rng& rng);

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// AES-128 in counter mode keyed by the seed, counter starting at zero.
/// Output is truncated to exactly out_bits.
BitString prg_expand(const Seed& seed, std::size_t out_bits);

/// XORs the first out.size() bytes of the seed's keystream into `out`.
void prg_xor_into(const Seed& seed, std::span<std::uint8_t> out);

}  // namespace privagg
