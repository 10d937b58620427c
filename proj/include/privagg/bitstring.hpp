#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privagg/rng.hpp"

namespace privagg {

/// Fixed-length bit sequence, packed most-significant-bit first within each
/// byte. Bits past size() in the last byte are always zero, so byte equality
/// is value equality.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t bits) : bits_(bits), bytes_((bits + 7) / 8, 0) {}

  /// Parses a string of '0'/'1' characters, first character is bit 0.
  static BitString from_string(std::string_view s);
  /// Copies ceil(bits/8) bytes; stray tail bits are cleared.
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);
  static BitString random(std::size_t bits, Rng& rng);
  /// All zeros except `value` (width bits) at slot `index` of width-bit slots.
  static BitString one_hot(std::size_t slots, std::size_t width, std::size_t index,
                           std::uint64_t value);

  std::size_t size() const { return bits_; }
  std::size_t byte_size() const { return bytes_.size(); }

  bool get(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1; }
  void set(std::size_t i, bool v) {
    const auto mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
    if (v) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }

  /// Reads `width` <= 64 bits starting at `offset` as a big-endian integer.
  std::uint64_t read(std::size_t offset, std::size_t width) const;
  /// Writes the low `width` bits of `value` starting at `offset`.
  void write(std::size_t offset, std::size_t width, std::uint64_t value);

  /// Copies `count` bits of `src` starting at `src_offset` to `dst_offset`.
  void copy_bits(std::size_t dst_offset, const BitString& src, std::size_t src_offset,
                 std::size_t count);

  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  bool none() const;
  std::size_t popcount() const;
  std::string to_string() const;

  std::span<const std::uint8_t> bytes() const { return bytes_; }
  std::span<std::uint8_t> mutable_bytes() { return bytes_; }
  /// Re-establishes the zero-tail invariant after raw byte writes.
  void clear_tail();

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

/// Bitwise exclusive-or of two equal-length strings; throws LengthError otherwise.
BitString bitwise_xor(const BitString& x, const BitString& y);

}  // namespace privagg
