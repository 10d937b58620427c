#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "privagg/rng.hpp"

namespace privagg {

// ---------------------------------------------------------------------------
// Location discretization
// ---------------------------------------------------------------------------

/// Square grid anchored at its south-west corner. The grid has
/// 2^(id_bits/2) cells per side and ids are 0-based row-major, rows running
/// north from the origin.
struct GridSpec {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double cell_miles = 0.25;
  unsigned id_bits = 16;

  std::uint64_t side() const { return std::uint64_t{1} << (id_bits / 2); }
  void validate() const;
};

struct GridCell {
  std::uint64_t row = 0;
  std::uint64_t col = 0;
};

inline constexpr double kMilesPerDegreeLat = 69.047;

std::uint64_t row_major_id(GridCell cell, std::uint64_t width);
GridCell locate_cell(double lat, double lon, const GridSpec& grid);
std::uint64_t discretize(double lat, double lon, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Responses
// ---------------------------------------------------------------------------

/// Binary two-round response. An empty round2 is an abstention, which the
/// harness turns into a null write.
struct BinaryResponse {
  bool round1 = false;
  std::optional<bool> round2;
  bool sampled = false;

  friend bool operator==(const BinaryResponse&, const BinaryResponse&) = default;
};

/// Multi-value two-round response: the set of values claimed in each round,
/// in domain order.
struct MultiResponse {
  std::vector<std::uint32_t> round1;
  std::vector<std::uint32_t> round2;
  bool sampled = false;

  friend bool operator==(const MultiResponse&, const MultiResponse&) = default;
};

// ---------------------------------------------------------------------------
// Randomized response
// ---------------------------------------------------------------------------

struct RrParams {
  double pi1 = 0.8;
  double pi2 = 0.2;
  void validate() const;
};

struct NoiseStddev {
  double exact = 0.0;          // sqrt(total * q * (1 - q))
  double approximation = 0.0;  // sqrt(total * q)
};

bool rr_privatize(bool truth, const RrParams& params, Rng& rng);
double rr_estimate(double private_sum, double total, const RrParams& params);
NoiseStddev rr_noise_stddev(const RrParams& params, double total);
double rr_epsilon(const RrParams& params);

// ---------------------------------------------------------------------------
// Two-round sampling mechanism, binary query
// ---------------------------------------------------------------------------

struct XyzBinaryParams {
  double pi_s = 0.45;
  double pi_yes = 0.2;
  double pi_no = 0.35;
  void validate() const;
};

BinaryResponse xyz_privatize_binary(bool truth, const XyzBinaryParams& params, Rng& rng);
double xyz_estimate(double sum_round1, double sum_round2, double pi_s);
double xyz_epsilon_binary(const XyzBinaryParams& params);

// ---------------------------------------------------------------------------
// Two-round sampling mechanism, multiple simultaneous values
// ---------------------------------------------------------------------------

struct XyzMultiParams {
  double pi_s = 0.1;
  double pi_v = 0.4;
  std::uint32_t domain_size = 0;
  void validate() const;
};

/// Per-value behaviour: the owner's true value is claimed in round one only
/// with probability pi_s (sampled), in both rounds with probability pi_v, and
/// not at all otherwise. Every other value is claimed in both rounds with
/// probability pi_v. Throws InvalidTruth if truth is not in the domain.
MultiResponse xyz_privatize_multi(std::uint32_t truth, std::span<const std::uint32_t> domain,
                                  const XyzMultiParams& params, Rng& rng);
/// Same mechanism for an owner with no true value in the domain.
MultiResponse xyz_privatize_multi(std::optional<std::uint32_t> truth,
                                  std::span<const std::uint32_t> domain,
                                  const XyzMultiParams& params, Rng& rng);

struct MultiLeakage {
  double round1 = 0.0;
  double round2 = 0.0;
  double epsilon() const { return round1 > round2 ? round1 : round2; }
};

MultiLeakage xyz_leakage_multi(const XyzMultiParams& params);
double xyz_epsilon_multi(const XyzMultiParams& params);

// ---------------------------------------------------------------------------
// Population-calibrated variant
// ---------------------------------------------------------------------------

/// Per-round Bernoulli rates for the Yes and No subpopulations. The No rates
/// must match across rounds so the No population cancels in the difference.
struct CalibratedParams {
  double pi_s_yes_1 = 0.5;
  double pi_s_no_1 = 0.1;
  double pi_s_yes_2 = 0.0;
  double pi_s_no_2 = 0.1;
  double pi_no = 0.0;
  void validate() const;
};

BinaryResponse calibrated_privatize(bool truth, const CalibratedParams& params, Rng& rng);
double calibrated_estimate(double sum1, double sum2, const CalibratedParams& params);

}  // namespace privagg
