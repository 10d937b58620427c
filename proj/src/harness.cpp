#include "privagg/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <string>
#include <unordered_map>

#include "privagg/errors.hpp"

namespace privagg {

// ---------------------------------------------------------------------------
// Mechanism selection
// ---------------------------------------------------------------------------

std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::rr:
      return "rr";
    case MechanismKind::xyz_binary:
      return "xyz_binary";
    case MechanismKind::xyz_multi:
      return "xyz_multi";
    case MechanismKind::calibrated:
      return "calibrated";
  }
  return "?";
}

MechanismKind parse_mechanism_kind(std::string_view name) {
  if (name == "rr") return MechanismKind::rr;
  if (name == "xyz_binary") return MechanismKind::xyz_binary;
  if (name == "xyz_multi") return MechanismKind::xyz_multi;
  if (name == "calibrated") return MechanismKind::calibrated;
  throw InvalidParams("unknown mechanism '" + std::string(name) + "'");
}

std::vector<std::uint32_t> MechanismConfig::reported_values() const {
  if (kind == MechanismKind::xyz_multi) return domain;
  return {query_value};
}

void MechanismConfig::validate() const {
  switch (kind) {
    case MechanismKind::rr:
      rr.validate();
      break;
    case MechanismKind::xyz_binary:
      xyz_binary.validate();
      break;
    case MechanismKind::calibrated:
      calibrated.validate();
      break;
    case MechanismKind::xyz_multi: {
      xyz_multi.validate();
      if (domain.empty()) throw InvalidParams("multi-value domain is empty");
      if (xyz_multi.domain_size != 0 && xyz_multi.domain_size != domain.size()) {
        throw InvalidParams("domain_size disagrees with the listed domain");
      }
      std::vector<std::uint32_t> sorted = domain;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidParams("multi-value domain lists a value twice");
      }
      break;
    }
  }
}

namespace {

std::vector<ClaimedWrite> binary_write(bool claim, std::uint32_t value) {
  return {claim ? ClaimedWrite(value) : std::nullopt};
}

}  // namespace

OwnerClaims privatize_owner(const Owner& owner, const MechanismConfig& mech, Rng& rng) {
  OwnerClaims out;
  const bool truth = owner.value == mech.query_value;
  switch (mech.kind) {
    case MechanismKind::rr:
      out.rounds[0] = binary_write(rr_privatize(truth, mech.rr, rng), mech.query_value);
      break;
    case MechanismKind::xyz_binary:
    case MechanismKind::calibrated: {
      const BinaryResponse r = mech.kind == MechanismKind::xyz_binary
                                   ? xyz_privatize_binary(truth, mech.xyz_binary, rng)
                                   : calibrated_privatize(truth, mech.calibrated, rng);
      out.rounds[0] = binary_write(r.round1, mech.query_value);
      out.rounds[1] = binary_write(r.round2.value_or(false), mech.query_value);
      out.sampled = r.sampled;
      break;
    }
    case MechanismKind::xyz_multi: {
      std::optional<std::uint32_t> truth_value;
      if (owner.value &&
          std::find(mech.domain.begin(), mech.domain.end(), *owner.value) != mech.domain.end()) {
        truth_value = owner.value;
      }
      const MultiResponse r = xyz_privatize_multi(truth_value, mech.domain, mech.xyz_multi, rng);
      out.rounds[0].assign(r.round1.begin(), r.round1.end());
      out.rounds[1].assign(r.round2.begin(), r.round2.end());
      // The withheld claim still costs a write so both rounds look alike.
      if (r.sampled) out.rounds[1].push_back(std::nullopt);
      out.sampled = r.sampled;
      break;
    }
  }
  return out;
}

std::map<std::uint32_t, double> estimate_counts(
    const std::array<std::map<std::uint32_t, std::uint64_t>, 2>& counts,
    std::uint64_t participants, const MechanismConfig& mech) {
  auto get = [&](int round, std::uint32_t v) -> double {
    const auto it = counts[round].find(v);
    return it == counts[round].end() ? 0.0 : static_cast<double>(it->second);
  };
  std::map<std::uint32_t, double> out;
  for (std::uint32_t v : mech.reported_values()) {
    switch (mech.kind) {
      case MechanismKind::rr:
        out[v] = rr_estimate(get(0, v), static_cast<double>(participants), mech.rr);
        break;
      case MechanismKind::xyz_binary:
        out[v] = xyz_estimate(get(0, v), get(1, v), mech.xyz_binary.pi_s);
        break;
      case MechanismKind::xyz_multi:
        out[v] = xyz_estimate(get(0, v), get(1, v), mech.xyz_multi.pi_s);
        break;
      case MechanismKind::calibrated:
        out[v] = calibrated_estimate(get(0, v), get(1, v), mech.calibrated);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Epoch configuration
// ---------------------------------------------------------------------------

namespace {

constexpr unsigned kMaxSlotBits = 40;

}  // namespace

void EpochConfig::validate() const {
  if (parties < 2 || parties > 12) throw InvalidParams("parties must be in [2, 12]");
  if (k_threshold < 2) throw InvalidParams("k_threshold must be at least 2");
  if (db_slots != 0 && (db_slots < 2 || !std::has_single_bit(db_slots) ||
                        db_slots > (std::uint64_t{1} << kMaxSlotBits))) {
    throw InvalidParams("db_slots must be a power of two in [2, 2^40]");
  }
  if (id_bits == 0 || id_bits > 32) throw InvalidParams("id_bits must be in [1, 32]");
  if (checksum_bits == 0 || checksum_bits > 32) {
    throw InvalidParams("checksum_bits must be in [1, 32]");
  }
  if (message_bits() > 64) throw InvalidParams("id_bits + checksum_bits must fit 64 bits");
  if (verify && verify_kind == BlindingKind::inverse) {
    // Every owner sends null writes, and the zero vector fails this check.
    throw InvalidParams("the inverse check rejects null writes; use square or product");
  }
  mech.validate();
  for (std::uint32_t v : mech.reported_values()) {
    if (id_bits < 32 && (v >> id_bits) != 0) {
      throw InvalidParams("value " + std::to_string(v) + " does not fit id_bits");
    }
  }
}

double expected_real_writes(const Population& population, const MechanismConfig& mech) {
  const auto total = static_cast<double>(population.size());
  double yes = 0;
  double in_domain = 0;
  for (const Owner& o : population) {
    if (!o.value) continue;
    if (*o.value == mech.query_value) ++yes;
    if (std::find(mech.domain.begin(), mech.domain.end(), *o.value) != mech.domain.end()) {
      ++in_domain;
    }
  }
  switch (mech.kind) {
    case MechanismKind::rr: {
      const double q = (1.0 - mech.rr.pi1) * mech.rr.pi2;
      return yes * (mech.rr.pi1 + q) + (total - yes) * q;
    }
    case MechanismKind::xyz_binary:
      return total * mech.xyz_binary.pi_yes + yes * mech.xyz_binary.pi_s;
    case MechanismKind::calibrated:
      return yes * mech.calibrated.pi_s_yes_1 + (total - yes) * mech.calibrated.pi_s_no_1;
    case MechanismKind::xyz_multi:
      return total * mech.xyz_multi.pi_v * static_cast<double>(mech.domain.size()) +
             in_domain * mech.xyz_multi.pi_s;
  }
  return total;
}

std::uint64_t resolve_db_slots(const EpochConfig& config, const Population& population) {
  if (config.db_slots != 0) return config.db_slots;
  const double want =
      std::ceil(static_cast<double>(kSlotsPerExpectedWrite) * expected_real_writes(population, config.mech));
  if (want > std::ldexp(1.0, kMaxSlotBits)) throw InvalidParams("epoch needs more than 2^40 slots");
  return std::bit_ceil(std::max<std::uint64_t>(2, static_cast<std::uint64_t>(want)));
}

EpochContext EpochContext::resolve(const EpochConfig& config, const Population& population) {
  config.validate();
  EpochContext ctx;
  ctx.parties = config.parties;
  ctx.db_slots = resolve_db_slots(config, population);
  const auto n = static_cast<unsigned>(std::countr_zero(ctx.db_slots));
  ctx.fss = FssParams::with_defaults(n, config.parties, config.message_bits());
  if (config.row_width) ctx.fss = ctx.fss.with_row_width(*config.row_width);
  ctx.id_bits = config.id_bits;
  ctx.checksum_bits = config.checksum_bits;
  ctx.epoch_id = config.epoch_id;
  ctx.verify = config.verify;
  ctx.verify_kind = config.verify_kind;
  ctx.two_rounds = config.mech.two_rounds();
  ctx.attack_value = config.mech.reported_values().front();
  return ctx;
}

// ---------------------------------------------------------------------------
// Slot encoding
// ---------------------------------------------------------------------------

namespace {

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

// SHA-256 rather than a CRC: a CRC is affine over XOR, so the XOR of an odd
// number of valid slots is itself valid and collisions would go unnoticed.
std::uint64_t slot_checksum(std::uint32_t id, std::uint64_t epoch_id, unsigned checksum_bits) {
  std::array<unsigned char, 12> buf{};
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(id >> (8 * i));
  for (int i = 0; i < 8; ++i) buf[4 + i] = static_cast<unsigned char>(epoch_id >> (8 * i));
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ProtocolAbort("SHA-256 failed");
  }
  std::uint64_t h = 0;
  for (int i = 0; i < 8; ++i) h = (h << 8) | digest[i];
  const std::uint64_t c = h & low_mask(checksum_bits);
  return c == 0 ? 1 : c;
}

std::uint64_t encode_slot(std::uint32_t id, std::uint64_t epoch_id, unsigned id_bits,
                          unsigned checksum_bits) {
  if (id_bits < 32 && (id >> id_bits) != 0) throw InvalidParams("id does not fit id_bits");
  return (std::uint64_t{id} << checksum_bits) | slot_checksum(id, epoch_id, checksum_bits);
}

std::uint64_t choose_slot(Rng& rng, std::uint64_t db_slots) { return uniform_below(rng, db_slots); }

// ---------------------------------------------------------------------------
// Submissions
// ---------------------------------------------------------------------------

namespace {

WriteBundle make_bundle(std::span<const std::pair<std::uint64_t, std::uint64_t>> writes,
                        std::span<const std::pair<std::uint64_t, FieldElement>> indicator,
                        const EpochContext& ctx, Rng& rng) {
  WriteBundle bundle;
  bundle.keys.resize(ctx.parties);
  for (const auto& [slot, message] : writes) {
    std::vector<FssKey> keys = fss_gen(PointFunction{slot, message}, ctx.fss, rng);
    for (unsigned i = 0; i < ctx.parties; ++i) bundle.keys[i].push_back(std::move(keys[i]));
  }
  if (ctx.verify) {
    std::vector<FieldElement> u(ctx.db_slots, FieldElement::zero());
    for (const auto& [slot, value] : indicator) u[slot] = value;
    const auto r = make_blinding<FieldElement>(ctx.verify_kind, ctx.db_slots, ctx.parties, rng);
    const auto shares = additive_share<FieldElement>(u, ctx.parties, rng);
    bundle.blinded.reserve(ctx.parties);
    for (const auto& share : shares) bundle.blinded.push_back(blind<FieldElement>(r, share));
  }
  return bundle;
}

}  // namespace

OwnerSubmission build_submission(std::uint64_t owner_id, const OwnerClaims& claims,
                                 const EpochContext& ctx, Rng& rng, Attack attack,
                                 WriteTrace* trace) {
  OwnerSubmission sub;
  sub.owner_id = owner_id;
  const int rounds = ctx.two_rounds ? 2 : 1;
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t w = 0; w < claims.rounds[r].size(); ++w) {
      const ClaimedWrite& claim = claims.rounds[r][w];
      const bool targeted = r == 0 && w == 0;
      const std::uint64_t slot = choose_slot(rng, ctx.db_slots);
      std::vector<std::pair<std::uint64_t, std::uint64_t>> writes;
      std::vector<std::pair<std::uint64_t, FieldElement>> indicator;

      if (targeted && attack == Attack::two_row_write) {
        const std::uint32_t value = claim.value_or(ctx.attack_value);
        const std::uint64_t message = encode_slot(value, ctx.epoch_id, ctx.id_bits, ctx.checksum_bits);
        std::uint64_t other = choose_slot(rng, ctx.db_slots);
        while (other == slot) other = choose_slot(rng, ctx.db_slots);
        writes = {{slot, message}, {other, message}};
        indicator = {{slot, FieldElement::one()}, {other, FieldElement::one()}};
      } else {
        const std::uint64_t message =
            claim ? encode_slot(*claim, ctx.epoch_id, ctx.id_bits, ctx.checksum_bits) : 0;
        writes = {{slot, message}};
        if (targeted && attack == Attack::inflated_indicator) {
          indicator = {{slot, FieldElement(2)}};
        } else if (claim) {
          indicator = {{slot, FieldElement::one()}};
        }
        if (trace && claim) trace->slots[r].emplace_back(slot, *claim);
      }
      sub.rounds[r].push_back(make_bundle(writes, indicator, ctx, rng));
    }
  }
  return sub;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

EpochAggregator::EpochAggregator(EpochContext ctx, Exec exec) : ctx_(std::move(ctx)), exec_(exec) {
  const int rounds = ctx_.two_rounds ? 2 : 1;
  const std::size_t bits = ctx_.db_slots * ctx_.fss.m;
  for (int r = 0; r < rounds; ++r) acc_[r].assign(ctx_.parties, BitString(bits));
}

EpochAggregator::Evaluation EpochAggregator::evaluate(const OwnerSubmission& submission) const {
  Evaluation ev;
  const int rounds = ctx_.two_rounds ? 2 : 1;
  if (!ctx_.two_rounds && !submission.rounds[1].empty()) return ev;
  if (ctx_.two_rounds && submission.rounds[0].size() != submission.rounds[1].size()) return ev;

  try {
    for (int r = 0; r < rounds; ++r) {
      for (const WriteBundle& bundle : submission.rounds[r]) {
        if (bundle.keys.size() != ctx_.parties) return ev;
        for (unsigned i = 0; i < ctx_.parties; ++i) {
          if (bundle.keys[i].empty()) return ev;
          for (const FssKey& key : bundle.keys[i]) {
            if (key.params != ctx_.fss || key.party_index != i) return ev;
          }
        }
        if (ctx_.verify &&
            !verify_owner<FieldElement>(bundle.blinded, ctx_.verify_kind, ctx_.parties)) {
          return ev;
        }
      }
    }
  } catch (const IncompleteSubmission&) {
    return ev;
  } catch (const DimensionError&) {
    return ev;
  }

  const std::size_t bits = ctx_.db_slots * ctx_.fss.m;
  for (int r = 0; r < rounds; ++r) {
    ev.contributions[r].assign(ctx_.parties, BitString(bits));
    for (const WriteBundle& bundle : submission.rounds[r]) {
      for (unsigned i = 0; i < ctx_.parties; ++i) {
        for (const FssKey& key : bundle.keys[i]) {
          ev.contributions[r][i] ^= exec_ == Exec::parallel ? fss_evaluate_share(key)
                                                            : fss_evaluate_share_serial(key);
        }
      }
    }
  }
  ev.valid = true;
  return ev;
}

IngestStatus EpochAggregator::commit(std::uint64_t owner_id, Evaluation&& evaluation) {
  if (!seen_.insert(owner_id).second) {
    ++duplicates_;
    return IngestStatus::duplicate;
  }
  if (!evaluation.valid) {
    ++rejected_;
    return IngestStatus::rejected;
  }
  const int rounds = ctx_.two_rounds ? 2 : 1;
  for (int r = 0; r < rounds; ++r) {
    for (unsigned i = 0; i < ctx_.parties; ++i) acc_[r][i] ^= evaluation.contributions[r][i];
  }
  ++participants_;
  return IngestStatus::accepted;
}

std::vector<std::uint64_t> reconstruct(std::span<const BitString> party_accumulators,
                                       unsigned parties, unsigned slot_bits) {
  if (party_accumulators.size() != parties) {
    throw ProtocolAbort("expected " + std::to_string(parties) + " party accumulators, got " +
                        std::to_string(party_accumulators.size()));
  }
  if (slot_bits == 0 || slot_bits > 64) throw ProtocolAbort("slot width must be in [1, 64]");
  const std::size_t bits = party_accumulators.front().size();
  for (const BitString& acc : party_accumulators) {
    if (acc.size() != bits) throw ProtocolAbort("party accumulators differ in length");
  }
  if (bits % slot_bits != 0) throw ProtocolAbort("accumulator length is not a whole number of slots");

  BitString db(bits);
  for (const BitString& acc : party_accumulators) db ^= acc;
  std::vector<std::uint64_t> slots(bits / slot_bits);
  for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = db.read(s * slot_bits, slot_bits);
  return slots;
}

CountResult count_values(std::span<const std::uint64_t> slots, unsigned id_bits,
                         unsigned checksum_bits, std::uint64_t epoch_id) {
  CountResult out;
  const std::uint64_t check_mask = low_mask(checksum_bits);
  const std::uint64_t id_mask = low_mask(id_bits);
  for (std::uint64_t slot : slots) {
    if (slot == 0) continue;
    const std::uint64_t id = (slot >> checksum_bits) & id_mask;
    const bool fits = checksum_bits + id_bits >= 64 || (slot >> (checksum_bits + id_bits)) == 0;
    if (fits && (slot & check_mask) == slot_checksum(static_cast<std::uint32_t>(id), epoch_id,
                                                     checksum_bits)) {
      ++out.counts[static_cast<std::uint32_t>(id)];
    } else {
      ++out.collision_drops;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Epoch runs
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kOwnerChunk = 128;

ValueCounts reported_true_counts(const Population& population, const MechanismConfig& mech) {
  const ValueCounts all = true_counts(population);
  ValueCounts out;
  for (std::uint32_t v : mech.reported_values()) {
    const auto it = all.find(v);
    out[v] = it == all.end() ? 0 : it->second;
  }
  return out;
}

void record_sampled(const Owner& owner, const OwnerClaims& claims, const MechanismConfig& mech,
                    ValueCounts& sampled) {
  if (!claims.sampled || !owner.value) return;
  const auto values = mech.reported_values();
  if (std::find(values.begin(), values.end(), *owner.value) != values.end()) {
    ++sampled[*owner.value];
  }
}

void release(EpochResult& result, std::uint64_t participants, std::uint64_t k,
             const MechanismConfig& mech) {
  result.diagnostics.participants = participants;
  if (participants < k) {
    result.halted = true;
    result.counts = {};
    result.reconstructed_db = {};
    return;
  }
  result.participation_at_least_k = true;
  result.estimates = estimate_counts(result.counts, participants, mech);
  for (const auto& [v, est] : result.estimates) {
    if (est < 0.0) result.diagnostics.negative_estimates.push_back(v);
  }
}

}  // namespace

EpochResult run_epoch(const Population& population, const EpochConfig& config,
                      const EpochOptions& options) {
  if (population.empty()) throw InvalidParams("population is empty");
  const EpochContext ctx = EpochContext::resolve(config, population);
  const int rounds = ctx.two_rounds ? 2 : 1;

  std::unordered_map<std::uint64_t, Attack> attacks;
  for (const auto& adv : options.adversaries) attacks[adv.owner_index] = adv.attack;
  auto attack_of = [&](std::uint64_t index) {
    const auto it = attacks.find(index);
    return it == attacks.end() ? Attack::none : it->second;
  };

  EpochResult result;
  EpochDiagnostics& diag = result.diagnostics;
  diag.crypto = true;
  diag.db_slots = ctx.db_slots;
  diag.true_counts = reported_true_counts(population, config.mech);

  EpochAggregator aggregator(ctx, options.exec);
  Rng privatize_rng = derive_rng(
      config.master_seed, {static_cast<std::uint64_t>(StreamTag::privatize), config.epoch_id});
  std::array<std::vector<std::pair<std::uint64_t, std::uint32_t>>, 2> slot_log;

  std::vector<OwnerClaims> claims;
  std::vector<EpochAggregator::Evaluation> evals;
  std::vector<WriteTrace> traces;
  std::vector<OwnerSubmission> replays;
  for (std::size_t start = 0; start < population.size(); start += kOwnerChunk) {
    const std::size_t count = std::min(kOwnerChunk, population.size() - start);
    claims.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      claims[i] = privatize_owner(population[start + i], config.mech, privatize_rng);
    }
    evals.assign(count, {});
    traces.assign(count, {});
    replays.assign(count, {});

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (options.exec == Exec::parallel)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(count); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const std::uint64_t index = start + i;
      const Attack attack = attack_of(index);
      if (attack == Attack::withhold) continue;
      try {
        Rng rng = derive_rng(config.master_seed, {static_cast<std::uint64_t>(StreamTag::crypto),
                                                  config.epoch_id, index});
        OwnerSubmission sub =
            build_submission(population[index].id, claims[i], ctx, rng, attack, &traces[i]);
        evals[i] = aggregator.evaluate(sub);
        if (attack == Attack::replay) replays[i] = std::move(sub);
      } catch (...) {
#pragma omp critical(privagg_epoch_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t index = start + i;
      const Attack attack = attack_of(index);
      if (attack == Attack::withhold) continue;
      const Owner& owner = population[index];
      if (aggregator.commit(owner.id, std::move(evals[i])) == IngestStatus::accepted) {
        for (int r = 0; r < rounds; ++r) {
          slot_log[r].insert(slot_log[r].end(), traces[i].slots[r].begin(), traces[i].slots[r].end());
        }
        record_sampled(owner, claims[i], config.mech, diag.sampled_truthful);
      }
      if (attack == Attack::replay) aggregator.ingest(replays[i]);
    }
  }

  diag.rejected_submissions = aggregator.rejected();
  diag.duplicate_submissions = aggregator.duplicates();

  for (int r = 0; r < rounds; ++r) {
    auto& log = slot_log[r];
    std::sort(log.begin(), log.end());
    for (std::size_t i = 0; i < log.size();) {
      std::size_t j = i;
      while (j < log.size() && log[j].first == log[i].first) ++j;
      if (j - i > 1) {
        // The slot holds the XOR of all its messages. Whatever still decodes
        // is counted; every other write in the group is lost.
        diag.collided_writes += j - i;
        std::uint64_t merged = 0;
        for (std::size_t w = i; w < j; ++w) {
          ++diag.lost_writes[r][log[w].second];
          merged ^= encode_slot(log[w].second, ctx.epoch_id, ctx.id_bits, ctx.checksum_bits);
        }
        const CountResult survivor =
            count_values(std::span(&merged, 1), ctx.id_bits, ctx.checksum_bits, ctx.epoch_id);
        if (!survivor.counts.empty()) {
          const std::uint32_t v = survivor.counts.begin()->first;
          auto it = diag.lost_writes[r].find(v);
          if (it != diag.lost_writes[r].end() && it->second > 0) {
            if (--it->second == 0) diag.lost_writes[r].erase(it);
          } else {
            ++diag.phantom_writes;
          }
        }
      }
      i = j;
    }

    const auto& accs = aggregator.accumulators(r);
    const auto slots = reconstruct(accs, ctx.parties, ctx.fss.m);
    BitString db(accs.front().size());
    for (const BitString& acc : accs) db ^= acc;
    result.reconstructed_db[r] = std::move(db);
    CountResult counted = count_values(slots, ctx.id_bits, ctx.checksum_bits, ctx.epoch_id);
    result.counts[r] = std::move(counted.counts);
    diag.collision_drops += counted.collision_drops;
  }

  release(result, aggregator.participants(), config.k_threshold, config.mech);
  return result;
}

EpochResult run_epoch_plain(const Population& population, const EpochConfig& config) {
  if (population.empty()) throw InvalidParams("population is empty");
  config.validate();

  EpochResult result;
  EpochDiagnostics& diag = result.diagnostics;
  diag.true_counts = reported_true_counts(population, config.mech);

  Rng privatize_rng = derive_rng(
      config.master_seed, {static_cast<std::uint64_t>(StreamTag::privatize), config.epoch_id});
  for (const Owner& owner : population) {
    const OwnerClaims claims = privatize_owner(owner, config.mech, privatize_rng);
    for (int r = 0; r < 2; ++r) {
      for (const ClaimedWrite& w : claims.rounds[r]) {
        if (w) ++result.counts[r][*w];
      }
    }
    record_sampled(owner, claims, config.mech, diag.sampled_truthful);
  }

  release(result, population.size(), config.k_threshold, config.mech);
  return result;
}

}  // namespace privagg
