#pragma once

// Independent reference computations for the unit and acceptance tests. Each
// one is written from the definition with plain integers, without calling the
// library routine it checks.

#include <cstdint>
#include <vector>

#include "privagg/bitstring.hpp"

namespace privagg::oracle {

/// Arithmetic mod a small prime on plain integers.
struct SmallMod {
  std::uint64_t z;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % z; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + z - b % z) % z; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % z; }
  std::uint64_t pow(std::uint64_t a, unsigned e) const {
    std::uint64_t r = 1 % z;
    for (unsigned i = 0; i < e; ++i) r = mul(r, a);
    return r;
  }
  /// Inverse by exhaustive search.
  std::uint64_t inv(std::uint64_t a) const {
    for (std::uint64_t y = 1; y < z; ++y) {
      if (mul(a, y) == 1) return y;
    }
    return 0;
  }
};

/// Bit i of the packed string, MSB-first, read straight from the bytes.
inline bool bit_at(const BitString& s, std::size_t i) {
  return (s.bytes()[i / 8] >> (7 - i % 8)) & 1u;
}

/// Message x of width m, assembled bit by bit.
inline std::uint64_t slot_value(const BitString& s, std::size_t x, unsigned m) {
  std::uint64_t v = 0;
  for (unsigned k = 0; k < m; ++k) v = (v << 1) | static_cast<std::uint64_t>(bit_at(s, x * m + k));
  return v;
}

/// True when s holds b at slot a and zero in every other m-bit slot.
inline bool is_point_vector(const BitString& s, std::uint64_t slots, unsigned m, std::uint64_t a,
                            std::uint64_t b) {
  if (s.size() != slots * m) return false;
  for (std::uint64_t x = 0; x < slots; ++x) {
    if (slot_value(s, x, m) != (x == a ? b : 0)) return false;
  }
  return true;
}

}  // namespace privagg::oracle
