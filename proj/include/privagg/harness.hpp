#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "privagg/bitstring.hpp"
#include "privagg/field.hpp"
#include "privagg/fss.hpp"
#include "privagg/mechanisms.hpp"
#include "privagg/rng.hpp"
#include "privagg/verify.hpp"

namespace privagg {

/// Serial reference or OpenMP-parallel execution of the data-parallel stages.
enum class Exec { serial, parallel };

// ---------------------------------------------------------------------------
// Population
// ---------------------------------------------------------------------------

/// A data owner and their true value; an empty value answers "No" to every
/// query.
struct Owner {
  std::uint64_t id = 0;
  std::optional<std::uint32_t> value;
};

using Population = std::vector<Owner>;

struct PopulationSpec {
  std::uint64_t total = 0;
  std::map<std::uint32_t, std::uint64_t> counts;
};

/// Assigns the requested truthful counts to randomly placed owners; the rest
/// have no value. Throws SpecError when the counts exceed the total.
Population generate_population(const PopulationSpec& spec, Rng& rng);

std::map<std::uint32_t, std::uint64_t> true_counts(const Population& population);

// ---------------------------------------------------------------------------
// Mechanism selection
// ---------------------------------------------------------------------------

enum class MechanismKind { rr, xyz_binary, xyz_multi, calibrated };

std::string_view to_string(MechanismKind kind);
MechanismKind parse_mechanism_kind(std::string_view name);

struct MechanismConfig {
  MechanismKind kind = MechanismKind::xyz_binary;
  RrParams rr;
  XyzBinaryParams xyz_binary;
  XyzMultiParams xyz_multi;
  CalibratedParams calibrated;
  /// Value asked about by the binary mechanisms.
  std::uint32_t query_value = 0;
  /// Values reported on by the multi-value mechanism.
  std::vector<std::uint32_t> domain;

  bool two_rounds() const { return kind != MechanismKind::rr; }
  /// Values that receive an estimate.
  std::vector<std::uint32_t> reported_values() const;
  void validate() const;
};

/// A single private write: the claimed value, or a null write (b = 0).
using ClaimedWrite = std::optional<std::uint32_t>;

/// Everything an owner writes in an epoch. Binary mechanisms write exactly
/// one entry per round; the multi-value mechanism writes one per claimed
/// value, and a sampled owner's withheld claim becomes a null write.
struct OwnerClaims {
  std::array<std::vector<ClaimedWrite>, 2> rounds;
  bool sampled = false;
};

OwnerClaims privatize_owner(const Owner& owner, const MechanismConfig& mech, Rng& rng);

/// Estimates per reported value from per-round counts. `participants` feeds
/// the randomized-response noise term.
std::map<std::uint32_t, double> estimate_counts(
    const std::array<std::map<std::uint32_t, std::uint64_t>, 2>& counts,
    std::uint64_t participants, const MechanismConfig& mech);

// ---------------------------------------------------------------------------
// Epoch configuration
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kSlotsPerExpectedWrite = 16;

struct EpochConfig {
  unsigned parties = 3;
  std::uint64_t k_threshold = 2;
  /// Database rows per round; 0 picks the next power of two at or above
  /// kSlotsPerExpectedWrite times the expected real writes per round.
  std::uint64_t db_slots = 0;
  /// FSS row-width override (mu); nu follows.
  std::optional<std::uint64_t> row_width;
  MechanismConfig mech;
  unsigned id_bits = 16;
  unsigned checksum_bits = 16;
  std::uint64_t epoch_id = 0;
  std::uint64_t master_seed = 0;
  bool verify = true;
  BlindingKind verify_kind = BlindingKind::square;

  unsigned message_bits() const { return id_bits + checksum_bits; }
  void validate() const;
};

/// Expected number of non-null writes in round one.
double expected_real_writes(const Population& population, const MechanismConfig& mech);
std::uint64_t resolve_db_slots(const EpochConfig& config, const Population& population);

/// Resolved per-epoch constants shared by owners and aggregators.
struct EpochContext {
  unsigned parties = 0;
  std::uint64_t db_slots = 0;
  FssParams fss;
  unsigned id_bits = 0;
  unsigned checksum_bits = 0;
  std::uint64_t epoch_id = 0;
  bool verify = true;
  BlindingKind verify_kind = BlindingKind::square;
  bool two_rounds = true;
  /// Value an attacking owner claims when its targeted write is null.
  std::uint32_t attack_value = 0;

  static EpochContext resolve(const EpochConfig& config, const Population& population);
};

// ---------------------------------------------------------------------------
// Slot encoding
// ---------------------------------------------------------------------------

/// Low bits of the first 8 bytes (big-endian) of SHA-256(id LE32 || epoch LE64),
/// never zero so a real write never reconstructs as an empty slot.
std::uint64_t slot_checksum(std::uint32_t id, std::uint64_t epoch_id, unsigned checksum_bits);
std::uint64_t encode_slot(std::uint32_t id, std::uint64_t epoch_id, unsigned id_bits,
                          unsigned checksum_bits);
std::uint64_t choose_slot(Rng& rng, std::uint64_t db_slots);

// ---------------------------------------------------------------------------
// Submissions
// ---------------------------------------------------------------------------

/// One write as sent to the aggregators: each party's FSS keys (one key for
/// an honest write) and its blinded verification share.
struct WriteBundle {
  std::vector<std::vector<FssKey>> keys;
  std::vector<BlindedShare<FieldElement>> blinded;
};

/// Both rounds travel in one envelope; dropping it drops both.
struct OwnerSubmission {
  std::uint64_t owner_id = 0;
  std::array<std::vector<WriteBundle>, 2> rounds;
};

enum class Attack {
  none,
  two_row_write,       // first write of round one lands in two rows
  inflated_indicator,  // verification vector carries 2 instead of 1
  withhold,            // owner privatizes but never submits
  replay,              // submission is delivered twice
};

/// Where each real write landed; simulator-side ground truth.
struct WriteTrace {
  std::array<std::vector<std::pair<std::uint64_t, std::uint32_t>>, 2> slots;
};

OwnerSubmission build_submission(std::uint64_t owner_id, const OwnerClaims& claims,
                                 const EpochContext& ctx, Rng& rng, Attack attack = Attack::none,
                                 WriteTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

enum class IngestStatus { accepted, duplicate, rejected };

/// The p aggregation parties of one epoch, simulated side by side. Each party
/// folds the full-domain evaluations of its keys into its per-round
/// accumulator; accumulators are only combined by reconstruct().
class EpochAggregator {
 public:
  /// Verification outcome and per-party contributions of one submission;
  /// computing it touches no aggregator state.
  struct Evaluation {
    bool valid = false;
    std::array<std::vector<BitString>, 2> contributions;  // [round][party]
  };

  explicit EpochAggregator(EpochContext ctx, Exec exec = Exec::parallel);

  Evaluation evaluate(const OwnerSubmission& submission) const;
  IngestStatus commit(std::uint64_t owner_id, Evaluation&& evaluation);
  IngestStatus ingest(const OwnerSubmission& submission) {
    return commit(submission.owner_id, evaluate(submission));
  }

  std::uint64_t participants() const { return participants_; }
  std::uint64_t rejected() const { return rejected_; }
  std::uint64_t duplicates() const { return duplicates_; }
  const std::vector<BitString>& accumulators(int round) const { return acc_[round]; }
  const EpochContext& context() const { return ctx_; }

 private:
  EpochContext ctx_;
  Exec exec_;
  std::array<std::vector<BitString>, 2> acc_;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t participants_ = 0;
  std::uint64_t rejected_ = 0;
  std::uint64_t duplicates_ = 0;
};

/// XOR of all parties' accumulators split into m-bit slots. Throws
/// ProtocolAbort when a party is missing or lengths disagree.
std::vector<std::uint64_t> reconstruct(std::span<const BitString> party_accumulators,
                                       unsigned parties, unsigned slot_bits);

struct CountResult {
  std::map<std::uint32_t, std::uint64_t> counts;
  std::uint64_t collision_drops = 0;
};

CountResult count_values(std::span<const std::uint64_t> slots, unsigned id_bits,
                         unsigned checksum_bits, std::uint64_t epoch_id);

// ---------------------------------------------------------------------------
// Epoch runs
// ---------------------------------------------------------------------------

using ValueCounts = std::map<std::uint32_t, std::uint64_t>;

/// Exact figures kept for tests and experiment logs; never part of a release.
struct EpochDiagnostics {
  bool crypto = false;
  std::uint64_t participants = 0;
  std::uint64_t rejected_submissions = 0;
  std::uint64_t duplicate_submissions = 0;
  std::uint64_t collision_drops = 0;
  std::uint64_t collided_writes = 0;
  std::uint64_t db_slots = 0;
  ValueCounts true_counts;
  ValueCounts sampled_truthful;
  /// Real writes per round whose slot was shared and did not decode back to
  /// them; crypto counts equal plain counts minus these.
  std::array<ValueCounts, 2> lost_writes;
  /// Collided slots whose XOR happened to decode to a value nobody wrote there.
  std::uint64_t phantom_writes = 0;
  std::vector<std::uint32_t> negative_estimates;
};

struct EpochResult {
  bool halted = false;
  /// The only public statement about participation: at least k owners.
  bool participation_at_least_k = false;
  std::array<ValueCounts, 2> counts;
  std::map<std::uint32_t, double> estimates;
  std::array<BitString, 2> reconstructed_db;
  EpochDiagnostics diagnostics;
};

struct AdversarialOwner {
  std::uint64_t owner_index = 0;
  Attack attack = Attack::none;
};

struct EpochOptions {
  Exec exec = Exec::parallel;
  std::vector<AdversarialOwner> adversaries;
};

/// Full pipeline: privatize, encode FSS writes with verification shares,
/// verify and accumulate per party, reconstruct, count, estimate.
EpochResult run_epoch(const Population& population, const EpochConfig& config,
                      const EpochOptions& options = {});

/// Same privatization draws, counted directly without the crypto layer.
EpochResult run_epoch_plain(const Population& population, const EpochConfig& config);

}  // namespace privagg
