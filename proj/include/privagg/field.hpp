#pragma once

#include <cstdint>
#include <ostream>

#include "privagg/errors.hpp"
#include "privagg/rng.hpp"

namespace privagg {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

namespace detail {
__extension__ using uint128 = unsigned __int128;
}  // namespace detail

/// Element of the prime field F_Z. The stored value is always fully reduced.
///
/// The deployment field is Z = 2^61 - 1, which gets a shift-and-add
/// reduction; any other prime (the test suite uses Z = 17) falls back to a
/// 128-bit remainder.
template <std::uint64_t Z>
class PrimeField {
  static_assert(Z > 2 && Z <= kMersenne61, "modulus must fit in 61 bits");

 public:
  static constexpr std::uint64_t modulus = Z;

  constexpr PrimeField() = default;
  constexpr explicit PrimeField(std::uint64_t v) : value_(v % Z) {}

  constexpr std::uint64_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  static constexpr PrimeField zero() { return PrimeField(); }
  static constexpr PrimeField one() { return PrimeField(1); }

  static PrimeField random(Rng& rng) {
    if constexpr (Z == kMersenne61) {
      for (;;) {
        std::uint64_t v = rng() & kMersenne61;
        if (v != kMersenne61) return from_reduced(v);
      }
    } else {
      return from_reduced(uniform_below(rng, Z));
    }
  }

  static PrimeField random_nonzero(Rng& rng) {
    for (;;) {
      PrimeField x = random(rng);
      if (!x.is_zero()) return x;
    }
  }

  friend constexpr PrimeField operator+(PrimeField a, PrimeField b) {
    std::uint64_t s = a.value_ + b.value_;
    return from_reduced(s >= Z ? s - Z : s);
  }
  friend constexpr PrimeField operator-(PrimeField a, PrimeField b) {
    return from_reduced(a.value_ >= b.value_ ? a.value_ - b.value_ : a.value_ + Z - b.value_);
  }
  friend constexpr PrimeField operator-(PrimeField a) { return zero() - a; }
  friend constexpr PrimeField operator*(PrimeField a, PrimeField b) {
    return from_reduced(mul_reduce(a.value_, b.value_));
  }
  PrimeField& operator+=(PrimeField b) { return *this = *this + b; }
  PrimeField& operator-=(PrimeField b) { return *this = *this - b; }
  PrimeField& operator*=(PrimeField b) { return *this = *this * b; }

  friend constexpr bool operator==(PrimeField, PrimeField) = default;

  friend std::ostream& operator<<(std::ostream& os, PrimeField x) { return os << x.value_; }

 private:
  static constexpr PrimeField from_reduced(std::uint64_t v) {
    PrimeField x;
    x.value_ = v;
    return x;
  }

  static constexpr std::uint64_t mul_reduce(std::uint64_t a, std::uint64_t b) {
    detail::uint128 z = static_cast<detail::uint128>(a) * b;
    if constexpr (Z == kMersenne61) {
      std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
      std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
      std::uint64_t s = lo + hi;
      return s >= Z ? s - Z : s;
    } else {
      return static_cast<std::uint64_t>(z % Z);
    }
  }

  std::uint64_t value_ = 0;
};

using FieldElement = PrimeField<kMersenne61>;

template <std::uint64_t Z>
constexpr PrimeField<Z> pow(PrimeField<Z> base, std::uint64_t exponent) {
  PrimeField<Z> result = PrimeField<Z>::one();
  while (exponent != 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

/// Multiplicative inverse via Fermat's little theorem.
template <std::uint64_t Z>
PrimeField<Z> inverse(PrimeField<Z> x) {
  if (x.is_zero()) throw DivisionByZero("inverse of zero field element");
  return pow(x, Z - 2);
}

}  // namespace privagg
