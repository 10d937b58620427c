#pragma once

// Exhaustive unit-vector verification over the mirror field F_17 with p = 3
// rows and n = 2 columns: every blinding matrix of a kind, every vector u.

#include <array>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "privagg/field.hpp"
#include "privagg/verify.hpp"

namespace privagg::oracle {

inline constexpr std::uint64_t kMirrorZ = 17;

/// entries[row][col] as plain integers.
using Matrix3 = std::array<std::array<std::uint64_t, 2>, 3>;

inline std::vector<Matrix3> all_matrices(BlindingKind kind) {
  const SmallMod mod{kMirrorZ};
  std::vector<Matrix3> out;
  auto column = [&](std::uint64_t r1, std::uint64_t r2) -> std::array<std::uint64_t, 3> {
    switch (kind) {
      case BlindingKind::square:
        return {r1, mod.pow(r1, 2), mod.pow(r1, 3)};
      case BlindingKind::product:
        return {r1, r2, mod.mul(r1, r2)};
      case BlindingKind::inverse:
        return {r1, r2, mod.inv(mod.mul(r1, r2))};
    }
    return {};
  };
  const std::uint64_t r2_max = kind == BlindingKind::square ? 1 : kMirrorZ - 1;
  for (std::uint64_t a1 = 1; a1 < kMirrorZ; ++a1)
    for (std::uint64_t a2 = 1; a2 <= r2_max; ++a2)
      for (std::uint64_t b1 = 1; b1 < kMirrorZ; ++b1)
        for (std::uint64_t b2 = 1; b2 <= r2_max; ++b2) {
          const auto ca = column(a1, a2), cb = column(b1, b2);
          Matrix3 m;
          for (int j = 0; j < 3; ++j) m[j] = {ca[j], cb[j]};
          out.push_back(m);
        }
  return out;
}

/// The acceptance rule spelled out on s = R u with plain integers.
inline bool oracle_accepts(BlindingKind kind, const Matrix3& r, std::uint64_t u0, std::uint64_t u1) {
  const SmallMod mod{kMirrorZ};
  std::array<std::uint64_t, 3> s{};
  for (int j = 0; j < 3; ++j) s[j] = mod.add(mod.mul(r[j][0], u0), mod.mul(r[j][1], u1));
  switch (kind) {
    case BlindingKind::square:
      return mod.pow(s[0], 2) == s[1] && mod.pow(s[0], 3) == s[2];
    case BlindingKind::product:
      return mod.mul(s[0], s[1]) == s[2];
    case BlindingKind::inverse:
      return mod.mul(mod.mul(s[0], s[1]), s[2]) == 1;
  }
  return false;
}

struct MirrorTable {
  std::size_t total = 0;  // matrices of the kind
  std::array<std::array<std::size_t, kMirrorZ>, kMirrorZ> accepted{};  // [u0][u1], by the oracle
  std::size_t mismatches = 0;  // (matrix, u) pairs where the library disagrees
};

/// Runs the library's blind + check next to the oracle on every pair.
inline MirrorTable mirror_truth_table(BlindingKind kind) {
  using F = PrimeField<kMirrorZ>;
  const auto matrices = all_matrices(kind);
  std::vector<BlindingMatrix<F>> lib;
  lib.reserve(matrices.size());
  for (const auto& m : matrices) {
    std::vector<F> entries;
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 2; ++c) entries.push_back(F(m[j][c]));
    lib.push_back(blinding_from_entries<F>(kind, 3, 2, std::move(entries)));
  }
  MirrorTable t;
  t.total = matrices.size();
  for (std::uint64_t u0 = 0; u0 < kMirrorZ; ++u0) {
    for (std::uint64_t u1 = 0; u1 < kMirrorZ; ++u1) {
      const std::vector<F> u{F(u0), F(u1)};
      for (std::size_t i = 0; i < matrices.size(); ++i) {
        const bool expect = oracle_accepts(kind, matrices[i], u0, u1);
        const auto s = blind<F>(lib[i], u);
        if (check<F>(kind, s) != expect) ++t.mismatches;
        t.accepted[u0][u1] += expect;
      }
    }
  }
  return t;
}

}  // namespace privagg::oracle
