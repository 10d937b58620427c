#pragma once

// Unit-vector verification over blinded additive shares.
//
// An owner splits its slot indicator u (all zeros, or a single 1) into p
// additive shares V_1..V_p over F_Z and hands party i the blinded share
// R * V_i, where R is a p-row blinding matrix with structured rows. Summing
// the blinded shares gives s = R * u without revealing u, and the structure
// of R lets the parties test the shape of u from s alone:
//
//   square   row j = r^j              accept iff s_1^j == s_j for j = 2..p
//   product  row p = prod rows 1..p-1 accept iff prod_{j<p} s_j == s_p
//   inverse  prod of all rows = 1     accept iff prod_j s_j == 1
//
// For u = e_a the sums collapse to column a of R and every identity holds.
// With two nonzero entries a, b the square check sees
// (r_a + r_b)^2 - (r_a^2 + r_b^2) = 2 r_a r_b != 0. A single entry of value
// u != 1 fails the square check because u^2 != u, which is why only 0/1
// indicators are verified; message payloads travel in the FSS write.
//
// The all-zero vector (an abstention) passes square and product but fails
// inverse. With p = 2 the product matrix has two identical rows, so its check
// accepts every vector.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privagg/errors.hpp"
#include "privagg/field.hpp"
#include "privagg/rng.hpp"

namespace privagg {

enum class BlindingKind { square, product, inverse };

inline std::string_view to_string(BlindingKind kind) {
  switch (kind) {
    case BlindingKind::square:
      return "square";
    case BlindingKind::product:
      return "product";
    case BlindingKind::inverse:
      return "inverse";
  }
  return "?";
}

inline BlindingKind parse_blinding_kind(std::string_view name) {
  if (name == "square") return BlindingKind::square;
  if (name == "product") return BlindingKind::product;
  if (name == "inverse") return BlindingKind::inverse;
  throw InvalidParams("unknown blinding kind '" + std::string(name) + "'");
}

/// p x n blinding matrix, row-major.
template <class F>
struct BlindingMatrix {
  BlindingKind kind = BlindingKind::square;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<F> entries;

  F at(std::size_t row, std::size_t col) const { return entries[row * columns + col]; }
};

/// One party's additive share of the indicator vector.
template <class F>
using AdditiveShareVector = std::vector<F>;

/// R * V_i: one field element per matrix row.
template <class F>
using BlindedShare = std::vector<F>;

template <class F>
std::vector<AdditiveShareVector<F>> additive_share(std::span<const F> u_hat, unsigned parties,
                                                   Rng& rng) {
  if (parties == 0) throw InvalidParams("at least one party is required");
  std::vector<AdditiveShareVector<F>> shares(parties);
  AdditiveShareVector<F> last(u_hat.begin(), u_hat.end());
  for (unsigned i = 0; i + 1 < parties; ++i) {
    auto& v = shares[i];
    v.resize(u_hat.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = F::random(rng);
      last[k] -= v[k];
    }
  }
  shares.back() = std::move(last);
  return shares;
}

namespace detail {

template <class F>
bool column_constraint_holds(BlindingKind kind, const BlindingMatrix<F>& r, std::size_t col) {
  const std::size_t p = r.rows;
  switch (kind) {
    case BlindingKind::square:
      for (std::size_t j = 1; j < p; ++j) {
        if (r.at(j, col) != pow(r.at(0, col), j + 1)) return false;
      }
      return true;
    case BlindingKind::product: {
      F prod = F::one();
      for (std::size_t j = 0; j + 1 < p; ++j) prod *= r.at(j, col);
      return prod == r.at(p - 1, col);
    }
    case BlindingKind::inverse: {
      F prod = F::one();
      for (std::size_t j = 0; j < p; ++j) prod *= r.at(j, col);
      return prod == F::one();
    }
  }
  return false;
}

}  // namespace detail

/// Samples a blinding matrix of the given kind. Free entries are uniform and
/// nonzero; a zero entry would blind column a to nothing.
template <class F>
BlindingMatrix<F> make_blinding(BlindingKind kind, std::size_t columns, unsigned parties,
                                Rng& rng) {
  if (parties < 2) throw InvalidParams("blinding needs at least two rows");
  BlindingMatrix<F> r{kind, parties, columns, std::vector<F>(parties * columns)};
  auto at = [&](std::size_t row, std::size_t col) -> F& { return r.entries[row * columns + col]; };
  for (std::size_t col = 0; col < columns; ++col) {
    switch (kind) {
      case BlindingKind::square: {
        const F base = F::random_nonzero(rng);
        F power = base;
        for (std::size_t j = 0; j < parties; ++j) {
          at(j, col) = power;
          power *= base;
        }
        break;
      }
      case BlindingKind::product:
      case BlindingKind::inverse: {
        F prod = F::one();
        for (std::size_t j = 0; j + 1 < parties; ++j) {
          at(j, col) = F::random_nonzero(rng);
          prod *= at(j, col);
        }
        at(parties - 1, col) = kind == BlindingKind::product ? prod : inverse(prod);
        break;
      }
    }
  }
  return r;
}

/// Wraps externally chosen entries (e.g. a dealer-sampled matrix), checking
/// the structural constraint of the kind on every column.
template <class F>
BlindingMatrix<F> blinding_from_entries(BlindingKind kind, std::size_t rows, std::size_t columns,
                                        std::vector<F> entries) {
  if (rows < 2 || entries.size() != rows * columns) {
    throw DimensionError("blinding entries do not form a rows x columns matrix");
  }
  BlindingMatrix<F> r{kind, rows, columns, std::move(entries)};
  for (std::size_t col = 0; col < columns; ++col) {
    for (std::size_t row = 0; row < rows; ++row) {
      if (r.at(row, col).is_zero()) throw InvalidParams("blinding entries must be nonzero");
    }
    if (!detail::column_constraint_holds(kind, r, col)) {
      throw InvalidParams("blinding column violates the " + std::string(to_string(kind)) +
                          " constraint");
    }
  }
  return r;
}

template <class F>
BlindedShare<F> blind(const BlindingMatrix<F>& r, std::span<const F> v) {
  if (v.size() != r.columns) throw DimensionError("share length does not match blinding columns");
  BlindedShare<F> out(r.rows, F::zero());
  for (std::size_t j = 0; j < r.rows; ++j) {
    const F* row = r.entries.data() + j * r.columns;
    F acc = F::zero();
    for (std::size_t i = 0; i < r.columns; ++i) acc += row[i] * v[i];
    out[j] = acc;
  }
  return out;
}

template <class F>
std::vector<F> aggregate(std::span<const BlindedShare<F>> shares) {
  if (shares.empty()) throw IncompleteSubmission("no blinded shares to aggregate");
  std::vector<F> s(shares.front().size(), F::zero());
  for (const auto& share : shares) {
    if (share.size() != s.size()) throw DimensionError("blinded shares differ in length");
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += share[j];
  }
  return s;
}

template <class F>
bool check_square(std::span<const F> s) {
  if (s.empty()) return false;
  F power = s[0];
  for (std::size_t j = 1; j < s.size(); ++j) {
    power *= s[0];
    if (power != s[j]) return false;
  }
  return true;
}

template <class F>
bool check_product(std::span<const F> s) {
  if (s.size() < 2) return false;
  F prod = F::one();
  for (std::size_t j = 0; j + 1 < s.size(); ++j) prod *= s[j];
  return prod == s.back();
}

template <class F>
bool check_inverse(std::span<const F> s) {
  if (s.empty()) return false;
  F prod = F::one();
  for (const F& x : s) prod *= x;
  return prod == F::one();
}

template <class F>
bool check(BlindingKind kind, std::span<const F> s) {
  switch (kind) {
    case BlindingKind::square:
      return check_square(s);
    case BlindingKind::product:
      return check_product(s);
    case BlindingKind::inverse:
      return check_inverse(s);
  }
  return false;
}

/// Aggregates one blinded share per party and applies the kind's check.
template <class F>
bool verify_owner(std::span<const BlindedShare<F>> blinded, BlindingKind kind, unsigned parties) {
  if (blinded.size() != parties) {
    throw IncompleteSubmission("expected " + std::to_string(parties) + " blinded shares, got " +
                               std::to_string(blinded.size()));
  }
  for (const auto& b : blinded) {
    if (b.size() != parties) throw IncompleteSubmission("blinded share has the wrong row count");
  }
  const std::vector<F> s = aggregate(blinded);
  return check<F>(kind, s);
}

}  // namespace privagg
