#include "privagg/it_write.hpp"

#include "privagg/errors.hpp"

namespace privagg {

ItKeySet it_gen(const PointFunction& pf, unsigned n, unsigned m, unsigned parties, Rng& rng) {
  if (parties < 2) throw InvalidParams("at least two database operators are required");
  if (m == 0 || m > 64 || n > 40) throw InvalidParams("unsupported row shape");
  const std::uint64_t rows = std::uint64_t{1} << n;
  if (pf.a >= rows) throw InvalidParams("row index out of range");
  if (m < 64 && pf.b >> m) throw InvalidParams("message wider than m bits");

  ItKeySet out;
  BitString encrypted = BitString::one_hot(rows, m, pf.a, pf.b);
  for (unsigned i = 0; i + 1 < parties; ++i) {
    out.shares.push_back(BitString::random(rows * m, rng));
    encrypted ^= out.shares.back();
  }
  out.shares.push_back(std::move(encrypted));
  return out;
}

BitString it_accumulate(const BitString& db, const BitString& share) { return db ^ share; }

}  // namespace privagg
