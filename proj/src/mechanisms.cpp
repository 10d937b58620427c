#include "privagg/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "privagg/errors.hpp"

namespace privagg {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParams(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (!(cell_miles > 0.0)) throw InvalidParams("cell_miles must be positive");
  if (id_bits < 2 || id_bits % 2 != 0 || id_bits > 62) {
    throw InvalidParams("id_bits must be even and in [2, 62]");
  }
  if (std::abs(origin_lat) >= 90.0) throw InvalidParams("origin latitude out of range");
}

std::uint64_t row_major_id(GridCell cell, std::uint64_t width) {
  return cell.row * width + cell.col;
}

GridCell locate_cell(double lat, double lon, const GridSpec& grid) {
  grid.validate();
  const double miles_per_deg_lon =
      kMilesPerDegreeLat * std::cos(grid.origin_lat * std::numbers::pi / 180.0);
  const double row = std::floor((lat - grid.origin_lat) * kMilesPerDegreeLat / grid.cell_miles);
  const double col = std::floor((lon - grid.origin_lon) * miles_per_deg_lon / grid.cell_miles);
  const auto side = static_cast<double>(grid.side());
  if (!(row >= 0.0 && row < side && col >= 0.0 && col < side)) {
    throw OutOfGrid("coordinate (" + std::to_string(lat) + ", " + std::to_string(lon) +
                    ") lies outside the grid");
  }
  return GridCell{static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col)};
}

std::uint64_t discretize(double lat, double lon, const GridSpec& grid) {
  return row_major_id(locate_cell(lat, lon, grid), grid.side());
}

// ---------------------------------------------------------------------------

void RrParams::validate() const {
  require_probability(pi1, "pi1");
  require_probability(pi2, "pi2");
}

bool rr_privatize(bool truth, const RrParams& params, Rng& rng) {
  if (uniform01(rng) < params.pi1) return truth;
  return uniform01(rng) < params.pi2;
}

double rr_estimate(double private_sum, double total, const RrParams& params) {
  if (!(total > 0.0)) throw InvalidParams("rr_estimate needs a positive total");
  if (!(params.pi1 > 0.0)) throw InvalidParams("rr_estimate needs pi1 > 0");
  const double noise = (1.0 - params.pi1) * params.pi2 * total;
  return (private_sum - noise) / params.pi1;
}

NoiseStddev rr_noise_stddev(const RrParams& params, double total) {
  if (total < 0.0) throw InvalidParams("total must be non-negative");
  const double q = (1.0 - params.pi1) * params.pi2;
  return NoiseStddev{std::sqrt(total * q * (1.0 - q)), std::sqrt(total * q)};
}

double rr_epsilon(const RrParams& params) {
  const double q = (1.0 - params.pi1) * params.pi2;
  if (!(q > 0.0)) throw InfiniteLeakage("randomized response with (1-pi1)*pi2 = 0");
  return std::log((params.pi1 + q) / q);
}

// ---------------------------------------------------------------------------

void XyzBinaryParams::validate() const {
  require_probability(pi_s, "pi_s");
  require_probability(pi_yes, "pi_yes");
  require_probability(pi_no, "pi_no");
  if (std::abs(pi_s + pi_yes + pi_no - 1.0) > 1e-12) {
    throw InvalidParams("pi_s + pi_yes + pi_no must equal 1");
  }
}

BinaryResponse xyz_privatize_binary(bool truth, const XyzBinaryParams& params, Rng& rng) {
  const double u = uniform01(rng);
  if (u < params.pi_s) return BinaryResponse{truth, std::nullopt, true};
  const bool yes = u < params.pi_s + params.pi_yes;
  return BinaryResponse{yes, yes, false};
}

double xyz_estimate(double sum_round1, double sum_round2, double pi_s) {
  if (!(pi_s > 0.0)) throw InvalidParams("sampling probability must be positive");
  return (sum_round1 - sum_round2) / pi_s;
}

double xyz_epsilon_binary(const XyzBinaryParams& params) {
  if (!(params.pi_yes > 0.0)) throw InfiniteLeakage("pi_yes = 0 makes a Yes response conclusive");
  const double up = std::log((params.pi_yes + params.pi_s) / params.pi_yes);
  return std::max(up, -up);
}

// ---------------------------------------------------------------------------

void XyzMultiParams::validate() const {
  require_probability(pi_s, "pi_s");
  require_probability(pi_v, "pi_v");
  if (!(pi_s > 0.0) || !(pi_v > 0.0)) throw InvalidParams("pi_s and pi_v must be positive");
  if (pi_s + pi_v > 1.0 + 1e-12) throw InvalidParams("pi_s + pi_v must not exceed 1");
}

MultiResponse xyz_privatize_multi(std::optional<std::uint32_t> truth,
                                  std::span<const std::uint32_t> domain,
                                  const XyzMultiParams& params, Rng& rng) {
  MultiResponse out;
  for (std::uint32_t v : domain) {
    const double u = uniform01(rng);
    if (truth && v == *truth) {
      if (u < params.pi_s) {
        out.sampled = true;
        out.round1.push_back(v);
      } else if (u < params.pi_s + params.pi_v) {
        out.round1.push_back(v);
        out.round2.push_back(v);
      }
    } else if (u < params.pi_v) {
      out.round1.push_back(v);
      out.round2.push_back(v);
    }
  }
  return out;
}

MultiResponse xyz_privatize_multi(std::uint32_t truth, std::span<const std::uint32_t> domain,
                                  const XyzMultiParams& params, Rng& rng) {
  if (std::find(domain.begin(), domain.end(), truth) == domain.end()) {
    throw InvalidTruth("true value " + std::to_string(truth) + " is not in the domain");
  }
  return xyz_privatize_multi(std::optional<std::uint32_t>(truth), domain, params, rng);
}

MultiLeakage xyz_leakage_multi(const XyzMultiParams& params) {
  if (!(params.pi_v > params.pi_s)) {
    throw UndefinedLeakage("round-two leakage needs pi_v > pi_s");
  }
  const double r1 = std::log((params.pi_v + params.pi_s) / params.pi_v);
  const double r2 = std::log(params.pi_v / (params.pi_v - params.pi_s));
  return MultiLeakage{std::max(r1, -r1), std::max(r2, -r2)};
}

double xyz_epsilon_multi(const XyzMultiParams& params) {
  return xyz_leakage_multi(params).epsilon();
}

// ---------------------------------------------------------------------------

void CalibratedParams::validate() const {
  require_probability(pi_s_yes_1, "pi_s_yes_1");
  require_probability(pi_s_no_1, "pi_s_no_1");
  require_probability(pi_s_yes_2, "pi_s_yes_2");
  require_probability(pi_s_no_2, "pi_s_no_2");
  require_probability(pi_no, "pi_no");
  if (!(pi_s_yes_1 > pi_s_yes_2)) throw InvalidParams("pi_s_yes_1 must exceed pi_s_yes_2");
  if (std::abs(pi_s_no_1 - pi_s_no_2) > 1e-12) {
    throw InvalidParams("pi_s_no_1 must equal pi_s_no_2");
  }
}

BinaryResponse calibrated_privatize(bool truth, const CalibratedParams& params, Rng& rng) {
  const double p1 = truth ? params.pi_s_yes_1 : params.pi_s_no_1;
  const double p2 = truth ? params.pi_s_yes_2 : params.pi_s_no_2;
  const bool r1 = uniform01(rng) < p1;
  const bool r2 = uniform01(rng) < p2;
  return BinaryResponse{r1, r2, false};
}

double calibrated_estimate(double sum1, double sum2, const CalibratedParams& params) {
  const double divisor = params.pi_s_yes_1 - params.pi_s_yes_2;
  if (divisor == 0.0) throw DegenerateCalibration("pi_s_yes_1 equals pi_s_yes_2");
  if (std::abs(params.pi_s_no_1 - params.pi_s_no_2) > 1e-12) {
    throw DegenerateCalibration("No-population rates differ across rounds");
  }
  return (sum1 - sum2) / divisor;
}

}  // namespace privagg
