#include <cstring>
#include <limits>
#include <string>

#include "privagg/errors.hpp"
#include "privagg/fss.hpp"

namespace privagg {

// Layout (little-endian integers):
//   u8 version | u8 n | u8 p | u16 lambda | u8 m | u32 mu | u32 nu | u8 party
//   sigma: nu * 2^(p-1) seeds of 16 bytes, row-major
//   correction words: 2^(p-1) * m * mu bits, one contiguous MSB-first
//   bitstream, zero-padded to a whole byte

std::uint64_t key_size_bits(const FssParams& params) {
  return params.nu * params.seed_slots() * params.lambda +
         params.seed_slots() * static_cast<std::uint64_t>(params.m) * params.mu;
}

std::uint64_t serialized_key_bytes(const FssParams& params) {
  const std::uint64_t sigma_bytes = params.nu * params.seed_slots() * (params.lambda / 8);
  const std::uint64_t cw_bits = params.seed_slots() * static_cast<std::uint64_t>(params.m) * params.mu;
  return kKeyHeaderBytes + sigma_bytes + (cw_bits + 7) / 8;
}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in[offset + i]) << (8 * i));
  return v;
}

constexpr std::uint64_t kU32Max = std::numeric_limits<std::uint32_t>::max();

}  // namespace

std::vector<std::uint8_t> key_serialize(const FssKey& key) {
  const FssParams& params = key.params;
  params.validate();
  if (params.mu > kU32Max || params.nu > kU32Max) {
    throw InvalidParams("row shape does not fit the key header");
  }
  if (key.sigma.size() != params.nu * params.seed_slots() ||
      key.correction_words.size() != params.seed_slots()) {
    throw InvalidParams("key body does not match its parameters");
  }

  std::vector<std::uint8_t> out;
  out.reserve(serialized_key_bytes(params));
  put_le<std::uint8_t>(out, kKeyFormatVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(params.n));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(params.p));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(params.lambda));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(params.m));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.mu));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.nu));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(key.party_index));

  for (const Seed& s : key.sigma) out.insert(out.end(), s.bytes.begin(), s.bytes.end());

  BitString cws(params.seed_slots() * params.row_bits());
  for (std::uint64_t j = 0; j < params.seed_slots(); ++j) {
    cws.copy_bits(j * params.row_bits(), key.correction_words[j], 0, params.row_bits());
  }
  out.insert(out.end(), cws.bytes().begin(), cws.bytes().end());
  return out;
}

FssKey key_deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kKeyHeaderBytes) throw ParseError("truncated key header");
  if (bytes[0] != kKeyFormatVersion) {
    throw ParseError("unsupported key format version " + std::to_string(bytes[0]));
  }

  FssKey key;
  FssParams& params = key.params;
  params.n = get_le<std::uint8_t>(bytes, 1);
  params.p = get_le<std::uint8_t>(bytes, 2);
  params.lambda = get_le<std::uint16_t>(bytes, 3);
  params.m = get_le<std::uint8_t>(bytes, 5);
  params.mu = get_le<std::uint32_t>(bytes, 6);
  params.nu = get_le<std::uint32_t>(bytes, 10);
  key.party_index = get_le<std::uint8_t>(bytes, 14);
  try {
    params.validate();
  } catch (const InvalidParams& e) {
    throw ParseError(std::string("malformed key header: ") + e.what());
  }
  if (key.party_index >= params.p) throw ParseError("party index exceeds party count");

  const std::uint64_t expected = serialized_key_bytes(params);
  if (bytes.size() < expected) throw ParseError("truncated key body");
  if (bytes.size() > expected) throw ParseError("trailing bytes after key body");

  std::size_t offset = kKeyHeaderBytes;
  key.sigma.resize(params.nu * params.seed_slots());
  for (Seed& s : key.sigma) {
    std::memcpy(s.bytes.data(), bytes.data() + offset, s.bytes.size());
    offset += s.bytes.size();
  }

  const std::size_t cw_bits = params.seed_slots() * params.row_bits();
  const BitString cws = BitString::from_bytes(bytes.subspan(offset), cw_bits);
  if (cw_bits % 8 != 0 && cws.bytes().back() != bytes.back()) {
    throw ParseError("nonzero padding after correction words");
  }
  key.correction_words.reserve(params.seed_slots());
  for (std::uint64_t j = 0; j < params.seed_slots(); ++j) {
    BitString cw(params.row_bits());
    cw.copy_bits(0, cws, j * params.row_bits(), params.row_bits());
    key.correction_words.push_back(std::move(cw));
  }
  return key;
}

}  // namespace privagg
