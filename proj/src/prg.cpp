#include "privagg/prg.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace privagg {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

EVP_CIPHER_CTX* thread_ctx() {
  thread_local std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  return ctx.get();
}

}  // namespace

bool Seed::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Seed Seed::random_nonzero(Rng& rng) {
  Seed s;
  do {
    for (std::size_t i = 0; i < s.bytes.size(); i += 8) {
      std::uint64_t w = rng();
      for (std::size_t k = 0; k < 8; ++k) s.bytes[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
    }
  } while (s.is_zero());
  return s;
}

void prg_xor_into(const Seed& seed, std::span<std::uint8_t> out) {
  static const std::uint8_t kZeroIv[16] = {};
  EVP_CIPHER_CTX* ctx = thread_ctx();
  if (EVP_EncryptInit_ex(ctx, EVP_aes_128_ctr(), nullptr, seed.bytes.data(), kZeroIv) != 1) {
    throw std::runtime_error("AES-CTR init failed");
  }
  // CTR encryption in place XORs the keystream into the buffer.
  std::size_t done = 0;
  while (done < out.size()) {
    const int chunk = static_cast<int>(std::min<std::size_t>(out.size() - done, 1 << 30));
    int produced = 0;
    if (EVP_EncryptUpdate(ctx, out.data() + done, &produced, out.data() + done, chunk) != 1) {
      throw std::runtime_error("AES-CTR update failed");
    }
    done += static_cast<std::size_t>(produced);
  }
}

BitString prg_expand(const Seed& seed, std::size_t out_bits) {
  BitString out(out_bits);
  prg_xor_into(seed, out.mutable_bytes());
  out.clear_tail();
  return out;
}

}  // namespace privagg
