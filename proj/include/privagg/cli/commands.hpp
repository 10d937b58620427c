#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privagg/cli/config.hpp"

namespace privagg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitAbort = 3,
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t total = 0;
  std::uint32_t value = 0;
  std::uint64_t true_count = 0;
  double estimate = 0.0;
};

struct SimulationOutput {
  std::vector<TrialRow> rows;
  json summary;
};

/// Runs config.trials epochs per population total. Relative dataset paths
/// resolve against base_dir.
SimulationOutput simulate(const ExperimentConfig& config, const std::filesystem::path& base_dir);

std::string trials_csv(const std::vector<TrialRow>& rows);

// ---------------------------------------------------------------------------
// epsilon
// ---------------------------------------------------------------------------

struct EpsilonRow {
  std::string mechanism;
  std::optional<double> pi1, pi2, pi_s, pi_yes, pi_v;
  std::optional<double> epsilon;  // empty = undefined
};

/// Default sweep over each mechanism's parameter grid.
std::vector<EpsilonRow> epsilon_sweep(const std::string& mechanism);
EpsilonRow epsilon_point(EpsilonRow row);
std::string epsilon_csv(const std::vector<EpsilonRow>& rows);

// ---------------------------------------------------------------------------
// benchmarks
// ---------------------------------------------------------------------------

struct FssBenchRow {
  std::string mu_mode;
  unsigned n = 0, p = 0;
  std::uint64_t mu = 0, nu = 0;
  double gen_time = 0.0;
  std::optional<double> naive_full_eval_time;
  double optimized_full_eval_time = 0.0;
  std::uint64_t key_bytes = 0;
};

struct FssBenchOptions {
  std::vector<unsigned> n{12, 14, 16};
  std::vector<unsigned> p{2, 3, 4};
  std::vector<double> mu_factors{0.5, 2.0};
  unsigned m = 32;
  unsigned runs = 5;
  /// Naive evaluation re-expands a whole row per input; skip it above this n.
  unsigned naive_max_n = 18;
  std::uint64_t seed = 0;
};

std::vector<FssBenchRow> bench_fss(const FssBenchOptions& options);
std::string fss_bench_csv(const std::vector<FssBenchRow>& rows);

struct VerifyBenchRow {
  unsigned p = 0;
  std::uint64_t n = 0;
  BlindingKind kind = BlindingKind::square;
  double median_time = 0.0;
  double throughput = 0.0;  // verifications per second
  unsigned slowest_runs = 0;
  unsigned runs = 0;
};

struct VerifyBenchOptions {
  std::vector<unsigned> p{2, 3, 5};
  std::vector<std::uint64_t> n{1024, 4096, 16384};
  unsigned runs = 10;
  std::uint64_t seed = 0;
};

std::vector<VerifyBenchRow> bench_verify(const VerifyBenchOptions& options);
std::string verify_bench_csv(const std::vector<VerifyBenchRow>& rows);

// ---------------------------------------------------------------------------

/// Full command line: simulate, epsilon, bench-fss, bench-verify, discretize.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace privagg::cli
