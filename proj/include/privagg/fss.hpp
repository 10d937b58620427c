#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "privagg/bitstring.hpp"
#include "privagg/it_write.hpp"
#include "privagg/prg.hpp"
#include "privagg/rng.hpp"

namespace privagg {

/// Shape of a multi-party FSS scheme for point functions over 2^n inputs.
///
/// The domain is laid out as nu rows of mu positions: input x sits in row
/// x / mu at position x % mu (high part selects the row, so full-domain
/// evaluation emits rows in ascending input order). Every party holds up to
/// 2^(p-1) seeds per row and the 2^(p-1) shared correction words of m*mu bits.
struct FssParams {
  unsigned n = 0;
  unsigned p = 0;
  unsigned lambda = static_cast<unsigned>(kSeedBits);
  unsigned m = 0;
  std::uint64_t mu = 0;
  std::uint64_t nu = 0;

  /// mu = ceil(2^(n/2) * 2^((p-1)/2)), nu = ceil(2^n / mu).
  static FssParams with_defaults(unsigned n, unsigned p, unsigned m);
  /// Same domain with a different row width; nu is re-derived.
  FssParams with_row_width(std::uint64_t row_width) const;

  std::uint64_t domain_size() const { return std::uint64_t{1} << n; }
  std::uint64_t seed_slots() const { return std::uint64_t{1} << (p - 1); }
  std::size_t row_bits() const { return static_cast<std::size_t>(m) * mu; }
  std::size_t row_bytes() const { return (row_bits() + 7) / 8; }

  void validate() const;

  friend bool operator==(const FssParams&, const FssParams&) = default;
};

/// Smallest mu with mu^2 >= 2^(n+p-1), computed exactly.
std::uint64_t default_row_width(unsigned n, unsigned p);

/// One party's key: nu * 2^(p-1) seed slots (all-zero = not held) followed
/// by the 2^(p-1) correction words.
struct FssKey {
  FssParams params;
  unsigned party_index = 0;
  std::vector<Seed> sigma;
  std::vector<BitString> correction_words;

  const Seed& slot(std::uint64_t row, std::uint64_t j) const {
    return sigma[row * params.seed_slots() + j];
  }

  friend bool operator==(const FssKey&, const FssKey&) = default;
};

/// Splits the point function into p keys. For every input x the XOR of all
/// parties' evaluations is b when x == a and zero otherwise.
std::vector<FssKey> fss_gen(const PointFunction& pf, const FssParams& params, Rng& rng);

/// XOR over held slots j of (cw_j ^ G(s_row,j)); m*mu bits.
BitString fss_eval_row(const FssKey& key, std::uint64_t row);

/// Full-domain evaluation, one PRG expansion per held seed per row, rows
/// evaluated in parallel. Returns 2^n * m bits, message x at [x*m, (x+1)*m).
BitString fss_evaluate_share(const FssKey& key);
/// Serial reference for fss_evaluate_share.
BitString fss_evaluate_share_serial(const FssKey& key);

/// Baseline single-point evaluation: re-expands the whole row for every x.
std::uint64_t fss_eval_naive(const FssKey& key, std::uint64_t x);
/// 2^n calls of fss_eval_naive, packed like fss_evaluate_share.
BitString fss_full_domain_naive(const FssKey& key);

// ---------------------------------------------------------------------------
// Wire format (see docs/key-format.md)
// ---------------------------------------------------------------------------

inline constexpr std::uint8_t kKeyFormatVersion = 1;
inline constexpr std::size_t kKeyHeaderBytes = 15;

/// nu * 2^(p-1) * lambda + 2^(p-1) * m * mu.
std::uint64_t key_size_bits(const FssParams& params);
/// Header plus the payload rounded up to whole bytes.
std::uint64_t serialized_key_bytes(const FssParams& params);

std::vector<std::uint8_t> key_serialize(const FssKey& key);
FssKey key_deserialize(std::span<const std::uint8_t> bytes);

}  // namespace privagg
