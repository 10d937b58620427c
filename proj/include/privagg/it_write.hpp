#pragma once

#include <cstdint>
#include <vector>

#include "privagg/bitstring.hpp"
#include "privagg/rng.hpp"

namespace privagg {

/// Writing message b into row a of a database with 2^n rows.
struct PointFunction {
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  friend bool operator==(const PointFunction&, const PointFunction&) = default;
};

/// Information-theoretic write: one full-length bitstring per database
/// operator, cumulatively XORing to the one-hot expansion e_a * b.
struct ItKeySet {
  std::vector<BitString> shares;
};

/// p - 1 uniformly random strings plus the "encrypted" string. Rows are m
/// bits wide, the database holds 2^n rows.
ItKeySet it_gen(const PointFunction& pf, unsigned n, unsigned m, unsigned parties, Rng& rng);

/// One operator's running accumulator: db ^ share.
BitString it_accumulate(const BitString& db, const BitString& share);

}  // namespace privagg
