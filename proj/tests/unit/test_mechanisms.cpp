#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privagg/errors.hpp"
#include "privagg/mechanisms.hpp"

namespace privagg {
namespace {

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// ---------------------------------------------------------------------------
// discretization

TEST(Discretize, OriginCornerIsZero) {
  const GridSpec grid{51.5, -0.1, 0.25, 16};
  EXPECT_EQ(discretize(51.5, -0.1, grid), 0u);
}

TEST(Discretize, RowMajorIndex) {
  EXPECT_EQ(row_major_id(GridCell{2, 1}, 3), 7u);
  // Same rule on a real grid: centre of row 2, col 1 on a 4x4 grid.
  const GridSpec grid{10.0, 20.0, 1.0, 4};
  const double lat_step = 1.0 / kMilesPerDegreeLat;
  const double lon_step = 1.0 / (kMilesPerDegreeLat * std::cos(10.0 * M_PI / 180.0));
  EXPECT_EQ(discretize(10.0 + 2.5 * lat_step, 20.0 + 1.5 * lon_step, grid), 2u * 4 + 1);
}

TEST(Discretize, FloorSemantics) {
  const GridSpec grid{0.0, 0.0, 0.25, 16};
  const double step = 0.25 / kMilesPerDegreeLat;  // cos(0) = 1
  EXPECT_EQ(discretize(0.1 * step, 1.1 * step, grid), 1u);
  EXPECT_EQ(discretize(1.0001 * step, 0.0, grid), 256u);
}

TEST(Discretize, FarCornerAndOutside) {
  const GridSpec grid{0.0, 0.0, 0.25, 16};
  const double step = 0.25 / kMilesPerDegreeLat;
  EXPECT_EQ(discretize(255.5 * step, 255.5 * step, grid), 65535u);
  EXPECT_THROW(discretize(256.5 * step, 0.0, grid), OutOfGrid);
  EXPECT_THROW(discretize(-0.5 * step, 0.0, grid), OutOfGrid);
  EXPECT_THROW(discretize(0.0, -0.5 * step, grid), OutOfGrid);
  EXPECT_THROW(discretize(0.0, 0.0, GridSpec{0.0, 0.0, 0.25, 15}), InvalidParams);
}

// ---------------------------------------------------------------------------
// randomized response

TEST(RandomizedResponse, DegenerateTruthfulCoin) {
  Rng rng(1);
  const RrParams params{1.0, 0.7};
  for (int i = 0; i < 1000; ++i) {
    ASSERT_TRUE(rr_privatize(true, params, rng));
    ASSERT_FALSE(rr_privatize(false, params, rng));
  }
}

TEST(RandomizedResponse, EmpiricalYesRate) {
  Rng rng(2);
  const RrParams params{0.85, 0.3};
  const int trials = 1'000'000;
  int ones = 0;
  for (int i = 0; i < trials; ++i) ones += rr_privatize(true, params, rng) ? 1 : 0;
  const double p = 0.85 + 0.15 * 0.3;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(static_cast<double>(ones) / trials, p, 4 * sigma);

  int noise = 0;
  for (int i = 0; i < trials; ++i) noise += rr_privatize(false, params, rng) ? 1 : 0;
  const double q = 0.15 * 0.3;
  EXPECT_NEAR(static_cast<double>(noise) / trials, q, 4 * std::sqrt(q * (1 - q) / trials));
}

TEST(RandomizedResponse, Estimate) {
  const RrParams params{0.85, 0.3};
  EXPECT_NEAR(rr_estimate(55.5, 100, params), 60.0, 1e-9);
  EXPECT_NEAR(rr_estimate(0.15 * 0.3 * 100, 100, params), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(rr_estimate(42, 100, RrParams{1.0, 0.3}), 42.0);
  EXPECT_LT(rr_estimate(0, 100, params), 0.0);  // reported, not clamped
  EXPECT_THROW(rr_estimate(1, 0, params), InvalidParams);
}

TEST(RandomizedResponse, NoiseStddev) {
  const RrParams params{0.85, 0.3};
  EXPECT_NEAR(rr_noise_stddev(params, 10'000).approximation, 21.2, 0.05);
  EXPECT_NEAR(rr_noise_stddev(params, 1'000'000).approximation, 212.0, 0.5);
  const double q = 0.045;
  EXPECT_NEAR(rr_noise_stddev(params, 10'000).exact, std::sqrt(10'000 * q * (1 - q)), 1e-12);
  EXPECT_EQ(rr_noise_stddev(params, 0).exact, 0.0);
  EXPECT_EQ(rr_noise_stddev(params, 0).approximation, 0.0);
}

TEST(RandomizedResponse, Epsilon) {
  EXPECT_NEAR(rr_epsilon(RrParams{0.8, 0.2}), std::log(21.0), 1e-12);
  EXPECT_NEAR(rr_epsilon(RrParams{0.8, 0.2}), 3.0445, 1e-4);
  EXPECT_NEAR(rr_epsilon(RrParams{0.85, 0.3}), std::log(0.895 / 0.045), 1e-12);
  EXPECT_NEAR(rr_epsilon(RrParams{0.85, 0.3}), 2.990, 1e-3);
  EXPECT_EQ(rr_epsilon(RrParams{0.0, 0.5}), 0.0);
  EXPECT_LT(rr_epsilon(RrParams{1e-9, 0.5}), 1e-8);
  EXPECT_THROW(rr_epsilon(RrParams{1.0, 0.5}), InfiniteLeakage);
  EXPECT_THROW(rr_epsilon(RrParams{0.5, 0.0}), InfiniteLeakage);
}

TEST(RandomizedResponse, EpsilonIncreasesInPi1) {
  for (double pi2 : {0.1, 0.2, 0.5, 0.9}) {
    double prev = -1.0;
    for (int i = 0; i < 20; ++i) {
      const double e = rr_epsilon(RrParams{i / 20.0, pi2});
      EXPECT_GT(e, prev);
      prev = e;
    }
  }
}

double rr_trial(std::uint64_t yes, std::uint64_t total, const RrParams& params, Rng& rng) {
  std::uint64_t sum = 0;
  for (std::uint64_t i = 0; i < total; ++i) sum += rr_privatize(i < yes, params, rng) ? 1 : 0;
  return rr_estimate(static_cast<double>(sum), static_cast<double>(total), params);
}

TEST(RandomizedResponse, ErrorGrowsWithSqrtTotal) {
  Rng rng(3);
  const RrParams params{0.8, 0.2};
  std::vector<double> sd;
  for (std::uint64_t total : {1'000u, 10'000u, 100'000u}) {
    std::vector<double> est;
    for (int t = 0; t < 400; ++t) est.push_back(rr_trial(100, total, params, rng));
    sd.push_back(stddev_of(est));
  }
  const double target = std::sqrt(10.0);
  EXPECT_NEAR(sd[1] / sd[0], target, 0.3 * target);
  EXPECT_NEAR(sd[2] / sd[1], target, 0.3 * target);
}

TEST(RandomizedResponse, Unbiased) {
  Rng rng(4);
  const RrParams params{0.8, 0.2};
  std::vector<double> est;
  for (int t = 0; t < 1000; ++t) est.push_back(rr_trial(100, 2'000, params, rng));
  EXPECT_NEAR(mean_of(est), 100.0, 3 * stddev_of(est) / std::sqrt(1000.0));
}

// ---------------------------------------------------------------------------
// two-round binary mechanism

TEST(XyzBinary, ForcedSampling) {
  Rng rng(5);
  const XyzBinaryParams params{1.0, 0.0, 0.0};
  const BinaryResponse r = xyz_privatize_binary(true, params, rng);
  EXPECT_TRUE(r.round1);
  EXPECT_FALSE(r.round2.has_value());
  EXPECT_TRUE(r.sampled);
}

TEST(XyzBinary, NonSampledRoundsAgree) {
  Rng rng(6);
  const XyzBinaryParams params{0.45, 0.2, 0.35};
  int sampled = 0;
  for (int i = 0; i < 100'000; ++i) {
    const BinaryResponse r = xyz_privatize_binary(i % 3 == 0, params, rng);
    if (r.sampled) {
      ++sampled;
      ASSERT_EQ(r.round1, i % 3 == 0);
      ASSERT_FALSE(r.round2.has_value());
    } else {
      ASSERT_EQ(r.round2, std::optional<bool>(r.round1));
    }
  }
  EXPECT_NEAR(sampled / 100'000.0, 0.45, 4 * std::sqrt(0.45 * 0.55 / 100'000));
}

TEST(XyzBinary, ValidateRequiresUnitSum) {
  EXPECT_NO_THROW((XyzBinaryParams{0.45, 0.2, 0.35}.validate()));
  EXPECT_THROW((XyzBinaryParams{0.45, 0.2, 0.3}.validate()), InvalidParams);
  EXPECT_THROW((XyzBinaryParams{1.2, -0.2, 0.0}.validate()), InvalidParams);
}

TEST(XyzBinary, Estimate) {
  EXPECT_NEAR(xyz_estimate(2045, 2000, 0.45), 100.0, 1e-9);
  EXPECT_EQ(xyz_estimate(17, 17, 0.3), 0.0);
  EXPECT_THROW(xyz_estimate(1, 0, 0.0), InvalidParams);
}

struct BinaryRun {
  std::uint64_t sum1 = 0, sum2 = 0, sampled_yes = 0;
};

BinaryRun xyz_run(std::uint64_t yes, std::uint64_t total, const XyzBinaryParams& params, Rng& rng) {
  BinaryRun run;
  for (std::uint64_t i = 0; i < total; ++i) {
    const bool truth = i < yes;
    const BinaryResponse r = xyz_privatize_binary(truth, params, rng);
    run.sum1 += r.round1 ? 1 : 0;
    run.sum2 += r.round2.value_or(false) ? 1 : 0;
    run.sampled_yes += (r.sampled && truth) ? 1 : 0;
  }
  return run;
}

TEST(XyzBinary, RoundDifferenceCountsSampledTruthful) {
  Rng rng(7);
  const XyzBinaryParams params{0.45, 0.2, 0.35};
  for (int t = 0; t < 50; ++t) {
    const BinaryRun run = xyz_run(100, 10'000, params, rng);
    ASSERT_EQ(run.sum1 - run.sum2, run.sampled_yes);
  }
}

TEST(XyzBinary, ExpectedRoundDifference) {
  // E[sum1] - E[sum2] = pi_s * Yes_pop; averaged over trials of 10,000 owners.
  Rng rng(8);
  const XyzBinaryParams params{0.45, 0.2, 0.35};
  std::vector<double> diff;
  for (int t = 0; t < 300; ++t) {
    const BinaryRun run = xyz_run(100, 10'000, params, rng);
    diff.push_back(static_cast<double>(run.sum1) - static_cast<double>(run.sum2));
  }
  const double se = std::sqrt(100 * 0.45 * 0.55 / 300.0);
  EXPECT_NEAR(mean_of(diff), 45.0, 3 * se);
}

TEST(XyzBinary, ConstantErrorAcrossNoPopulation) {
  Rng rng(9);
  const XyzBinaryParams params{0.45, 0.2, 0.35};
  std::vector<double> small, large;
  for (int t = 0; t < 200; ++t) {
    BinaryRun a = xyz_run(100, 100 + 10'000, params, rng);
    BinaryRun b = xyz_run(100, 100 + 1'000'000, params, rng);
    small.push_back(xyz_estimate(static_cast<double>(a.sum1), static_cast<double>(a.sum2), 0.45));
    large.push_back(xyz_estimate(static_cast<double>(b.sum1), static_cast<double>(b.sum2), 0.45));
  }
  const double ratio = stddev_of(large) / stddev_of(small);
  EXPECT_GT(ratio, 0.75);
  EXPECT_LT(ratio, 1.25);
  // Binomial(100, 0.45) / 0.45 has stddev sqrt(100 * 0.45 * 0.55) / 0.45.
  const double predicted = std::sqrt(100 * 0.45 * 0.55) / 0.45;
  EXPECT_NEAR(stddev_of(large), predicted, 0.25 * predicted);
}

TEST(XyzBinary, Unbiased) {
  Rng rng(10);
  const XyzBinaryParams params{0.45, 0.2, 0.35};
  std::vector<double> est;
  for (int t = 0; t < 1000; ++t) {
    const BinaryRun run = xyz_run(100, 2'000, params, rng);
    est.push_back(xyz_estimate(static_cast<double>(run.sum1), static_cast<double>(run.sum2), 0.45));
  }
  EXPECT_NEAR(mean_of(est), 100.0, 3 * stddev_of(est) / std::sqrt(1000.0));
}

TEST(XyzBinary, Epsilon) {
  EXPECT_NEAR(xyz_epsilon_binary(XyzBinaryParams{0.45, 0.2, 0.35}), std::log(3.25), 1e-12);
  EXPECT_NEAR(xyz_epsilon_binary(XyzBinaryParams{0.45, 0.2, 0.35}), 1.1787, 1e-4);
  EXPECT_NEAR(xyz_epsilon_binary(XyzBinaryParams{0.25, 0.2, 0.55}), std::log(0.45 / 0.2), 1e-12);
  EXPECT_NEAR(xyz_epsilon_binary(XyzBinaryParams{0.25, 0.2, 0.55}), 0.8109, 1e-4);
  EXPECT_EQ(xyz_epsilon_binary(XyzBinaryParams{0.0, 0.2, 0.8}), 0.0);
  EXPECT_THROW(xyz_epsilon_binary(XyzBinaryParams{0.5, 0.0, 0.5}), InfiniteLeakage);
}

TEST(XyzBinary, EpsilonMonotonicity) {
  for (int y = 1; y <= 5; ++y) {
    const double pi_yes = y / 10.0;
    double prev = -1.0;
    for (int s = 0; s <= 5; ++s) {
      const double pi_s = s / 10.0;
      const double e = xyz_epsilon_binary(XyzBinaryParams{pi_s, pi_yes, 1.0 - pi_s - pi_yes});
      EXPECT_GT(e, prev);
      prev = e;
    }
  }
  for (int s = 1; s <= 4; ++s) {
    const double pi_s = s / 10.0;
    double prev = 1e9;
    for (int y = 1; y <= 5; ++y) {
      const double pi_yes = y / 10.0;
      const double e = xyz_epsilon_binary(XyzBinaryParams{pi_s, pi_yes, 1.0 - pi_s - pi_yes});
      EXPECT_LT(e, prev);
      prev = e;
    }
  }
}

// ---------------------------------------------------------------------------
// two-round multi-value mechanism

const std::vector<std::uint32_t> kDomain{1, 2, 3, 4, 5, 6, 7, 8};

TEST(XyzMulti, Illustration) {
  // Search for draws where the owner at 8 is sampled and random picks are
  // {1, 2, 4, 5}; round two must then drop exactly the truthful 8.
  const XyzMultiParams params{0.5, 0.5, 8};
  const std::vector<std::uint32_t> want1{1, 2, 4, 5, 8};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 100'000 && !found; ++seed) {
    Rng rng(seed);
    const MultiResponse r = xyz_privatize_multi(8u, kDomain, params, rng);
    if (r.sampled && r.round1 == want1) {
      EXPECT_EQ(r.round2, (std::vector<std::uint32_t>{1, 2, 4, 5}));
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(XyzMulti, RoundStructure) {
  Rng rng(11);
  const XyzMultiParams params{0.2, 0.3, 8};
  for (int i = 0; i < 20'000; ++i) {
    const std::uint32_t truth = kDomain[i % 8];
    const MultiResponse r = xyz_privatize_multi(truth, kDomain, params, rng);
    std::vector<std::uint32_t> expected2 = r.round1;
    if (r.sampled) {
      ASSERT_TRUE(std::find(r.round1.begin(), r.round1.end(), truth) != r.round1.end());
      expected2.erase(std::find(expected2.begin(), expected2.end(), truth));
    }
    ASSERT_EQ(r.round2, expected2);
  }
}

TEST(XyzMulti, VanishingRatesGiveEmptyRounds) {
  Rng rng(12);
  const XyzMultiParams params{1e-12, 1e-12, 8};
  const MultiResponse r = xyz_privatize_multi(3u, kDomain, params, rng);
  EXPECT_FALSE(r.sampled);
  EXPECT_TRUE(r.round1.empty());
  EXPECT_TRUE(r.round2.empty());
}

TEST(XyzMulti, TruthOutsideDomain) {
  Rng rng(13);
  EXPECT_THROW(xyz_privatize_multi(9u, kDomain, XyzMultiParams{0.1, 0.4, 8}, rng), InvalidTruth);
}

TEST(XyzMulti, PerValueEstimatorUnbiased) {
  Rng rng(14);
  const XyzMultiParams params{0.3, 0.4, 3};
  const std::vector<std::uint32_t> domain{1, 2, 3};
  // 50 owners at 1, 30 at 2, none at 3, 420 with no value in the domain.
  std::vector<std::vector<double>> est(3);
  for (int t = 0; t < 1000; ++t) {
    std::array<double, 3> s1{}, s2{};
    for (int o = 0; o < 500; ++o) {
      std::optional<std::uint32_t> truth;
      if (o < 50) truth = 1;
      else if (o < 80) truth = 2;
      const MultiResponse r = xyz_privatize_multi(truth, domain, params, rng);
      for (auto v : r.round1) s1[v - 1] += 1;
      for (auto v : r.round2) s2[v - 1] += 1;
    }
    for (int v = 0; v < 3; ++v) est[v].push_back(xyz_estimate(s1[v], s2[v], 0.3));
  }
  const std::array<double, 3> truth{50, 30, 0};
  for (int v = 0; v < 3; ++v) {
    EXPECT_NEAR(mean_of(est[v]), truth[v], 3 * stddev_of(est[v]) / std::sqrt(1000.0)) << v + 1;
  }
}

TEST(XyzMulti, Epsilon) {
  const XyzMultiParams params{0.1, 0.4, 8};
  EXPECT_NEAR(xyz_epsilon_multi(params), std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(xyz_epsilon_multi(params), 0.2877, 1e-4);
  EXPECT_NEAR(xyz_leakage_multi(params).round1, std::log(0.5 / 0.4), 1e-12);
  EXPECT_LT(xyz_epsilon_multi(XyzMultiParams{1e-9, 0.4, 8}), 1e-8);
  EXPECT_THROW(xyz_epsilon_multi(XyzMultiParams{0.45, 0.4, 8}), UndefinedLeakage);
  EXPECT_THROW(xyz_epsilon_multi(XyzMultiParams{0.4, 0.4, 8}), UndefinedLeakage);
}

TEST(XyzMulti, RoundTwoDominatesOnGrid) {
  for (int s = 1; s <= 9; ++s) {
    for (int v = s + 1; v + s <= 20; ++v) {
      const MultiLeakage l = xyz_leakage_multi(XyzMultiParams{s / 20.0, v / 20.0, 4});
      EXPECT_GE(l.round2, l.round1) << s << "," << v;
    }
  }
}

// ---------------------------------------------------------------------------
// calibrated variant

TEST(Calibrated, Degenerate) {
  Rng rng(15);
  const CalibratedParams params{1.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(calibrated_privatize(true, params, rng), (BinaryResponse{true, false, false}));
  EXPECT_EQ(calibrated_privatize(false, params, rng), (BinaryResponse{false, false, false}));
}

TEST(Calibrated, Estimate) {
  const CalibratedParams params{0.5, 0.1, 0.0, 0.1, 0.0};
  EXPECT_DOUBLE_EQ(calibrated_estimate(150, 50, params), 200.0);
  EXPECT_EQ(calibrated_estimate(70, 70, params), 0.0);
  EXPECT_THROW(calibrated_estimate(1, 0, CalibratedParams{0.3, 0.1, 0.3, 0.1, 0.0}),
               DegenerateCalibration);
  EXPECT_THROW(calibrated_estimate(1, 0, CalibratedParams{0.5, 0.1, 0.0, 0.2, 0.0}),
               DegenerateCalibration);
}

TEST(Calibrated, Validate) {
  EXPECT_NO_THROW((CalibratedParams{0.5, 0.1, 0.1, 0.1, 0.0}.validate()));
  EXPECT_THROW((CalibratedParams{0.1, 0.1, 0.5, 0.1, 0.0}.validate()), InvalidParams);
  EXPECT_THROW((CalibratedParams{0.5, 0.1, 0.1, 0.2, 0.0}.validate()), InvalidParams);
}

TEST(Calibrated, ExpectedDifferenceAndMonteCarlo) {
  Rng rng(16);
  const CalibratedParams params{0.6, 0.05, 0.2, 0.05, 0.0};
  const int yes = 200, total = 5'000, trials = 1000;
  std::vector<double> est;
  for (int t = 0; t < trials; ++t) {
    double s1 = 0, s2 = 0;
    for (int o = 0; o < total; ++o) {
      const BinaryResponse r = calibrated_privatize(o < yes, params, rng);
      s1 += r.round1 ? 1 : 0;
      s2 += r.round2.value_or(false) ? 1 : 0;
    }
    est.push_back(calibrated_estimate(s1, s2, params));
  }
  // Independent rounds: Var(sum1 - sum2) is the sum of both rounds' binomial variances.
  const double var = yes * (0.6 * 0.4 + 0.2 * 0.8) + (total - yes) * 2 * 0.05 * 0.95;
  const double sigma = std::sqrt(var) / 0.4;
  EXPECT_NEAR(mean_of(est), yes, 3 * sigma / std::sqrt(trials));
  EXPECT_NEAR(stddev_of(est), sigma, 0.1 * sigma);
}

}  // namespace
}  // namespace privagg
