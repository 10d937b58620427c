#include "privagg/bitstring.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "privagg/errors.hpp"

namespace privagg {

BitString BitString::from_string(std::string_view s) {
  BitString out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      out.set(i, true);
    } else if (s[i] != '0') {
      throw ParseError("bit string may only contain '0' and '1'");
    }
  }
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
  BitString out(bits);
  if (bytes.size() < out.bytes_.size()) throw LengthError("byte buffer shorter than bit length");
  std::memcpy(out.bytes_.data(), bytes.data(), out.bytes_.size());
  out.clear_tail();
  return out;
}

BitString BitString::random(std::size_t bits, Rng& rng) {
  BitString out(bits);
  for (std::size_t i = 0; i < out.bytes_.size(); i += 8) {
    const std::uint64_t w = rng();
    for (std::size_t k = 0; k < 8 && i + k < out.bytes_.size(); ++k) {
      out.bytes_[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
    }
  }
  out.clear_tail();
  return out;
}

BitString BitString::one_hot(std::size_t slots, std::size_t width, std::size_t index,
                             std::uint64_t value) {
  BitString out(slots * width);
  out.write(index * width, width, value);
  return out;
}

std::uint64_t BitString::read(std::size_t offset, std::size_t width) const {
  if (width > 64 || offset + width > bits_) throw LengthError("bit read out of range");
  std::uint64_t v = 0;
  std::size_t i = offset;
  const std::size_t end = offset + width;
  // leading partial byte
  while (i < end && (i & 7) != 0) v = (v << 1) | static_cast<std::uint64_t>(get(i++));
  while (i + 8 <= end) {
    v = (v << 8) | bytes_[i >> 3];
    i += 8;
  }
  while (i < end) v = (v << 1) | static_cast<std::uint64_t>(get(i++));
  return v;
}

void BitString::write(std::size_t offset, std::size_t width, std::uint64_t value) {
  if (width > 64 || offset + width > bits_) throw LengthError("bit write out of range");
  for (std::size_t k = 0; k < width; ++k) {
    set(offset + k, (value >> (width - 1 - k)) & 1);
  }
}

namespace {

// Eight bits of `bytes` starting at an arbitrary bit position; bits beyond the
// buffer read as zero.
std::uint8_t byte_at(std::span<const std::uint8_t> bytes, std::size_t bitpos) {
  const std::size_t idx = bitpos >> 3;
  const unsigned shift = bitpos & 7;
  const unsigned hi = bytes[idx];
  if (shift == 0) return static_cast<std::uint8_t>(hi);
  const unsigned lo = idx + 1 < bytes.size() ? bytes[idx + 1] : 0;
  return static_cast<std::uint8_t>((hi << shift) | (lo >> (8 - shift)));
}

}  // namespace

void BitString::copy_bits(std::size_t dst_offset, const BitString& src, std::size_t src_offset,
                          std::size_t count) {
  if (dst_offset + count > bits_ || src_offset + count > src.bits_) {
    throw LengthError("bit copy out of range");
  }
  std::size_t done = 0;
  while (done < count && ((dst_offset + done) & 7) != 0) {
    set(dst_offset + done, src.get(src_offset + done));
    ++done;
  }
  if ((src_offset + done) % 8 == 0) {
    const std::size_t whole = (count - done) / 8;
    std::memcpy(bytes_.data() + ((dst_offset + done) >> 3),
                src.bytes_.data() + ((src_offset + done) >> 3), whole);
    done += whole * 8;
  } else {
    while (done + 8 <= count) {
      bytes_[(dst_offset + done) >> 3] = byte_at(src.bytes_, src_offset + done);
      done += 8;
    }
  }
  for (; done < count; ++done) set(dst_offset + done, src.get(src_offset + done));
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.bits_ != bits_) throw LengthError("xor of bit strings with different lengths");
  const std::size_t n = bytes_.size();
  std::uint8_t* d = bytes_.data();
  const std::uint8_t* s = other.bytes_.data();
  for (std::size_t i = 0; i < n; ++i) d[i] ^= s[i];
  return *this;
}

bool BitString::none() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::size_t BitString::popcount() const {
  std::size_t c = 0;
  for (auto b : bytes_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

std::string BitString::to_string() const {
  std::string s(bits_, '0');
  for (std::size_t i = 0; i < bits_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

void BitString::clear_tail() {
  if (bits_ % 8 != 0) {
    bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - bits_ % 8));
  }
}

BitString bitwise_xor(const BitString& x, const BitString& y) { return x ^ y; }

}  // namespace privagg
