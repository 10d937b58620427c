#include "privagg/fss.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "privagg/errors.hpp"

namespace privagg {

std::uint64_t default_row_width(unsigned n, unsigned p) {
  const unsigned e = n + p - 1;
  // e <= 51, so mu^2 stays well inside 64 bits.
  const std::uint64_t target = std::uint64_t{1} << e;
  auto mu = static_cast<std::uint64_t>(std::sqrt(std::ldexp(1.0, static_cast<int>(e))));
  while (mu > 0 && (mu - 1) * (mu - 1) >= target) --mu;
  while (mu * mu < target) ++mu;
  return mu;
}

FssParams FssParams::with_defaults(unsigned n, unsigned p, unsigned m) {
  FssParams out;
  out.n = n;
  out.p = p;
  out.m = m;
  if (p < 2 || p > 12 || n > 40) throw InvalidParams("unsupported FSS shape");
  return out.with_row_width(default_row_width(n, p));
}

FssParams FssParams::with_row_width(std::uint64_t row_width) const {
  if (row_width == 0) throw InvalidParams("row width must be positive");
  FssParams out = *this;
  out.mu = row_width;
  out.nu = (domain_size() + row_width - 1) / row_width;
  out.validate();
  return out;
}

void FssParams::validate() const {
  if (p < 2 || p > 12) throw InvalidParams("party count must be in [2, 12]");
  if (n > 40) throw InvalidParams("input bits must be at most 40");
  if (lambda != kSeedBits) throw InvalidParams("only 128-bit seeds are supported");
  if (m == 0 || m > 64) throw InvalidParams("message width must be in [1, 64]");
  if (mu == 0 || nu != (domain_size() + mu - 1) / mu) {
    throw InvalidParams("nu must equal ceil(2^n / mu)");
  }
}

// ---------------------------------------------------------------------------
// Key generation
// ---------------------------------------------------------------------------

namespace {

// Every p-bit column of one parity, each exactly once. A selection matrix is
// a random column permutation of this list. Restricted to any p - 1 parties
// the columns then run through all 2^(p-1) patterns once, whichever parity
// the row has; independently drawn columns would leave the special row
// unmasked whenever no column is held by the missing party alone.
std::vector<std::uint32_t> parity_columns(unsigned p, bool odd) {
  std::vector<std::uint32_t> cols;
  cols.reserve(std::size_t{1} << (p - 1));
  for (std::uint32_t c = 0; c < (std::uint32_t{1} << p); ++c) {
    if ((std::popcount(c) % 2 == 1) == odd) cols.push_back(c);
  }
  return cols;
}

void mask_tail(std::span<std::uint8_t> bytes, std::size_t bits) {
  if (bits % 8 != 0) bytes.back() &= static_cast<std::uint8_t>(0xFFu << (8 - bits % 8));
}

}  // namespace

std::vector<FssKey> fss_gen(const PointFunction& pf, const FssParams& params, Rng& rng) {
  params.validate();
  if (pf.a >= params.domain_size()) throw InvalidParams("point outside the FSS domain");
  if (params.m < 64 && (pf.b >> params.m) != 0) throw InvalidParams("message wider than m bits");

  const std::uint64_t slots = params.seed_slots();
  const std::uint64_t special_row = pf.a / params.mu;
  const std::uint64_t position = pf.a % params.mu;

  std::vector<FssKey> keys(params.p);
  for (unsigned i = 0; i < params.p; ++i) {
    keys[i].params = params;
    keys[i].party_index = i;
    keys[i].sigma.resize(params.nu * slots);
  }

  std::vector<Seed> special_seeds;
  special_seeds.reserve(slots);
  std::vector<std::uint32_t> even = parity_columns(params.p, false);
  std::vector<std::uint32_t> odd_cols = parity_columns(params.p, true);
  for (std::uint64_t row = 0; row < params.nu; ++row) {
    const bool odd = row == special_row;
    std::vector<std::uint32_t>& matrix = odd ? odd_cols : even;
    std::shuffle(matrix.begin(), matrix.end(), rng);
    for (std::uint64_t j = 0; j < slots; ++j) {
      const Seed seed = Seed::random_nonzero(rng);
      const std::uint32_t column = matrix[j];
      for (unsigned i = 0; i < params.p; ++i) {
        if ((column >> i) & 1) keys[i].sigma[row * slots + j] = seed;
      }
      if (odd) special_seeds.push_back(seed);
    }
  }

  // Correction words: random except the last, which forces
  // XOR_j (cw_j ^ G(s_special,j)) = e_position * b.
  BitString last = BitString::one_hot(params.mu, params.m, position, pf.b);
  for (const Seed& s : special_seeds) {
    prg_xor_into(s, last.mutable_bytes());
    last.clear_tail();
  }
  std::vector<BitString> cws;
  cws.reserve(slots);
  for (std::uint64_t j = 0; j + 1 < slots; ++j) {
    cws.push_back(BitString::random(params.row_bits(), rng));
    last ^= cws.back();
  }
  cws.push_back(std::move(last));

  for (auto& key : keys) key.correction_words = cws;
  return keys;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

void eval_row_into(const FssKey& key, std::uint64_t row, std::span<std::uint8_t> out) {
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  const std::uint64_t slots = key.params.seed_slots();
  for (std::uint64_t j = 0; j < slots; ++j) {
    const Seed& seed = key.slot(row, j);
    if (seed.is_zero()) continue;
    const auto cw = key.correction_words[j].bytes();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] ^= cw[k];
    prg_xor_into(seed, out);
  }
  mask_tail(out, key.params.row_bits());
}

std::size_t row_span_bits(const FssParams& params, std::uint64_t row) {
  const std::uint64_t total = params.domain_size() * params.m;
  const std::uint64_t start = row * params.row_bits();
  return static_cast<std::size_t>(std::min<std::uint64_t>(params.row_bits(), total - start));
}

}  // namespace

BitString fss_eval_row(const FssKey& key, std::uint64_t row) {
  if (row >= key.params.nu) throw InvalidParams("row index out of range");
  BitString out(key.params.row_bits());
  eval_row_into(key, row, out.mutable_bytes());
  return out;
}

BitString fss_evaluate_share_serial(const FssKey& key) {
  const FssParams& params = key.params;
  BitString out(params.domain_size() * params.m);
  BitString row_buf(params.row_bits());
  for (std::uint64_t row = 0; row < params.nu; ++row) {
    eval_row_into(key, row, row_buf.mutable_bytes());
    out.copy_bits(row * params.row_bits(), row_buf, 0, row_span_bits(params, row));
  }
  return out;
}

BitString fss_evaluate_share(const FssKey& key) {
  const FssParams& params = key.params;
  const auto rows = static_cast<std::int64_t>(params.nu);
  BitString out(params.domain_size() * params.m);

  if (params.row_bits() % 8 == 0) {
    // Rows occupy disjoint whole bytes of the output.
    auto dst = out.mutable_bytes();
#pragma omp parallel
    {
      std::vector<std::uint8_t> buf(params.row_bytes());
#pragma omp for schedule(static)
      for (std::int64_t row = 0; row < rows; ++row) {
        const auto r = static_cast<std::uint64_t>(row);
        eval_row_into(key, r, buf);
        const std::size_t len = (row_span_bits(params, r) + 7) / 8;
        std::memcpy(dst.data() + r * params.row_bytes(), buf.data(), len);
      }
    }
    out.clear_tail();
    return out;
  }

  std::vector<BitString> evaluated(params.nu, BitString(params.row_bits()));
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < rows; ++row) {
    const auto r = static_cast<std::uint64_t>(row);
    eval_row_into(key, r, evaluated[r].mutable_bytes());
  }
  for (std::uint64_t r = 0; r < params.nu; ++r) {
    out.copy_bits(r * params.row_bits(), evaluated[r], 0, row_span_bits(params, r));
  }
  return out;
}

std::uint64_t fss_eval_naive(const FssKey& key, std::uint64_t x) {
  if (x >= key.params.domain_size()) throw InvalidParams("input outside the FSS domain");
  const BitString row = fss_eval_row(key, x / key.params.mu);
  return row.read((x % key.params.mu) * key.params.m, key.params.m);
}

BitString fss_full_domain_naive(const FssKey& key) {
  const FssParams& params = key.params;
  BitString out(params.domain_size() * params.m);
  for (std::uint64_t x = 0; x < params.domain_size(); ++x) {
    out.write(x * params.m, params.m, fss_eval_naive(key, x));
  }
  return out;
}

}  // namespace privagg
