#include "privagg/cli/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "privagg/errors.hpp"
#include "privagg/fss.hpp"
#include "privagg/mechanisms.hpp"
#include "privagg/verify.hpp"

namespace privagg::cli {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x, const char* missing = "") {
  return x ? fmt(*x) : missing;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Nearest-rank quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace {

struct TrialOutcome {
  EpochResult result;
  std::uint64_t total = 0;
  std::uint64_t trial = 0;
};

json value_stats(std::uint32_t value, std::uint64_t true_count,
                 const std::vector<const TrialOutcome*>& trials) {
  std::vector<double> estimates;
  double abs_err = 0.0;
  for (const TrialOutcome* t : trials) {
    if (t->result.halted) continue;
    const double est = t->result.estimates.at(value);
    estimates.push_back(est);
    abs_err += std::abs(est - static_cast<double>(true_count));
  }
  json j = {{"value", value}, {"true_count", true_count}, {"released_trials", estimates.size()}};
  if (estimates.empty()) {
    j["mean_abs_error"] = nullptr;
    j["mean_estimate"] = nullptr;
    j["stddev"] = nullptr;
    j["interval95"] = nullptr;
    return j;
  }
  const auto n = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n;
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  std::sort(estimates.begin(), estimates.end());
  j["mean_abs_error"] = abs_err / n;
  j["mean_estimate"] = mean;
  j["stddev"] = estimates.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  j["interval95"] = {quantile(estimates, 0.025), quantile(estimates, 0.975)};
  return j;
}

}  // namespace

SimulationOutput simulate(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  std::optional<Population> dataset;
  if (config.dataset) {
    std::filesystem::path path = config.dataset->path;
    if (path.is_relative()) path = base_dir / path;
    dataset = load_dataset_csv(path, config.epoch.id_bits, config.dataset->pad_to_total);
  }

  std::vector<std::uint64_t> totals = config.sweep_totals;
  if (totals.empty()) totals.push_back(dataset ? dataset->size() : config.population->total);

  std::vector<TrialOutcome> outcomes(totals.size() * config.trials);
  for (std::size_t ti = 0; ti < totals.size(); ++ti) {
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      outcomes[ti * config.trials + t].total = totals[ti];
      outcomes[ti * config.trials + t].trial = t;
    }
  }

  auto run_one = [&](TrialOutcome& out) {
    const std::uint64_t trial_seed =
        derive_rng(config.seed, {static_cast<std::uint64_t>(StreamTag::trial), out.total, out.trial})();
    Population population;
    if (dataset) {
      population = *dataset;
    } else {
      PopulationSpec spec = *config.population;
      spec.total = out.total;
      Rng rng = derive_rng(trial_seed, {static_cast<std::uint64_t>(StreamTag::population)});
      population = generate_population(spec, rng);
    }
    EpochConfig epoch = config.epoch;
    epoch.master_seed = trial_seed;
    out.result = config.crypto ? run_epoch(population, epoch) : run_epoch_plain(population, epoch);
  };

  if (config.crypto) {
    // Each crypto epoch parallelizes internally.
    for (auto& o : outcomes) run_one(o);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(outcomes.size()); ++i) {
      try {
        run_one(outcomes[static_cast<std::size_t>(i)]);
      } catch (...) {
#pragma omp critical(privagg_simulate_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  SimulationOutput output;
  json per_total = json::array();
  for (std::size_t ti = 0; ti < totals.size(); ++ti) {
    std::vector<const TrialOutcome*> trials;
    std::uint64_t halted = 0, rejected = 0, duplicates = 0, drops = 0, collided = 0, phantom = 0,
                  negative = 0;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      const TrialOutcome& o = outcomes[ti * config.trials + t];
      trials.push_back(&o);
      const EpochDiagnostics& d = o.result.diagnostics;
      halted += o.result.halted ? 1 : 0;
      rejected += d.rejected_submissions;
      duplicates += d.duplicate_submissions;
      drops += d.collision_drops;
      collided += d.collided_writes;
      phantom += d.phantom_writes;
      negative += d.negative_estimates.size();
      if (o.result.halted) continue;
      for (const auto& [value, est] : o.result.estimates) {
        output.rows.push_back(TrialRow{o.trial, o.total, value, d.true_counts.at(value), est});
      }
    }

    json values = json::array();
    const ValueCounts& truth = outcomes[ti * config.trials].result.diagnostics.true_counts;
    for (std::uint32_t v : config.epoch.mech.reported_values()) {
      values.push_back(value_stats(v, truth.at(v), trials));
    }
    per_total.push_back({
        {"total", totals[ti]},
        {"trials", config.trials},
        {"values", values},
        {"diagnostics",
         {{"halted_trials", halted},
          {"rejected_submissions", rejected},
          {"duplicate_submissions", duplicates},
          {"collision_drops", drops},
          {"collided_writes", collided},
          {"phantom_writes", phantom},
          {"negative_estimates", negative}}},
    });
  }
  output.summary = {{"config", dump_config(config)}, {"results", per_total}};
  return output;
}

std::string trials_csv(const std::vector<TrialRow>& rows) {
  std::string out = "trial,total,value,true_count,estimate,abs_error\n";
  for (const TrialRow& r : rows) {
    out += std::to_string(r.trial) + "," + std::to_string(r.total) + "," + std::to_string(r.value) +
           "," + std::to_string(r.true_count) + "," + fmt(r.estimate) + "," +
           fmt(std::abs(r.estimate - static_cast<double>(r.true_count))) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// epsilon
// ---------------------------------------------------------------------------

EpsilonRow epsilon_point(EpsilonRow row) {
  row.epsilon.reset();
  try {
    if (row.mechanism == "rr") {
      const RrParams params{row.pi1.value(), row.pi2.value()};
      params.validate();
      row.epsilon = rr_epsilon(params);
    } else if (row.mechanism == "xyz_binary") {
      const XyzBinaryParams params{row.pi_s.value(), row.pi_yes.value(),
                                   1.0 - row.pi_s.value() - row.pi_yes.value()};
      params.validate();
      row.epsilon = xyz_epsilon_binary(params);
    } else if (row.mechanism == "xyz_multi") {
      const XyzMultiParams params{row.pi_s.value(), row.pi_v.value(), 0};
      params.validate();
      row.epsilon = xyz_epsilon_multi(params);
    } else {
      throw ConfigError("unknown mechanism '" + row.mechanism + "'");
    }
  } catch (const std::bad_optional_access&) {
    throw ConfigError("missing parameter for " + row.mechanism);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error&) {
    // Precondition violated: leave the value undefined.
  }
  return row;
}

std::vector<EpsilonRow> epsilon_sweep(const std::string& mechanism) {
  const bool all = mechanism == "all";
  if (!all && mechanism != "rr" && mechanism != "xyz_binary" && mechanism != "xyz_multi") {
    throw ConfigError("unknown mechanism '" + mechanism + "'");
  }
  std::vector<EpsilonRow> rows;
  if (all || mechanism == "rr") {
    for (double pi2 : {0.2, 0.5}) {
      for (int i = 1; i <= 10; ++i) {
        EpsilonRow r;
        r.mechanism = "rr";
        r.pi1 = i / 10.0;
        r.pi2 = pi2;
        rows.push_back(epsilon_point(r));
      }
    }
  }
  if (all || mechanism == "xyz_binary") {
    for (double pi_yes : {0.1, 0.2, 0.3}) {
      for (int i = 1; i <= 18; ++i) {
        EpsilonRow r;
        r.mechanism = "xyz_binary";
        r.pi_s = i / 20.0;
        r.pi_yes = pi_yes;
        if (*r.pi_s + pi_yes > 1.0) continue;
        rows.push_back(epsilon_point(r));
      }
    }
  }
  if (all || mechanism == "xyz_multi") {
    for (double pi_s : {0.05, 0.1, 0.2, 0.3, 0.45}) {
      for (int i = 1; i <= 5; ++i) {
        EpsilonRow r;
        r.mechanism = "xyz_multi";
        r.pi_s = pi_s;
        r.pi_v = i / 10.0;
        rows.push_back(epsilon_point(r));
      }
    }
  }
  return rows;
}

std::string epsilon_csv(const std::vector<EpsilonRow>& rows) {
  std::string out = "mechanism,pi1,pi2,pi_s,pi_yes,pi_v,epsilon\n";
  for (const EpsilonRow& r : rows) {
    out += r.mechanism + "," + fmt(r.pi1) + "," + fmt(r.pi2) + "," + fmt(r.pi_s) + "," +
           fmt(r.pi_yes) + "," + fmt(r.pi_v) + "," + fmt(r.epsilon, "undefined") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// benchmarks
// ---------------------------------------------------------------------------

std::vector<FssBenchRow> bench_fss(const FssBenchOptions& options) {
  if (options.runs == 0) throw ConfigError("runs must be positive");
  std::vector<FssBenchRow> rows;
  Rng rng = derive_rng(options.seed, {0xF55});
  for (unsigned p : options.p) {
    for (unsigned n : options.n) {
      const FssParams base = FssParams::with_defaults(n, p, options.m);
      std::vector<std::pair<std::string, FssParams>> shapes{{"default", base}};
      for (double f : options.mu_factors) {
        const auto mu = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::llround(static_cast<double>(base.mu) * f)));
        shapes.emplace_back("x" + fmt(f), base.with_row_width(mu));
      }
      for (const auto& [mode, params] : shapes) {
        const PointFunction pf{uniform_below(rng, params.domain_size()),
                               uniform_below(rng, std::uint64_t{1} << std::min(params.m, 63u))};
        std::vector<FssKey> keys = fss_gen(pf, params, rng);  // warmup
        std::vector<double> gen, opt, naive;
        for (unsigned r = 0; r < options.runs; ++r) {
          gen.push_back(seconds([&] { keys = fss_gen(pf, params, rng); }));
        }
        (void)fss_evaluate_share(keys[0]);
        for (unsigned r = 0; r < options.runs; ++r) {
          opt.push_back(seconds([&] { (void)fss_evaluate_share(keys[0]); }));
        }
        FssBenchRow row{mode, n, p, params.mu, params.nu, median(gen), std::nullopt, median(opt),
                        key_serialize(keys[0]).size()};
        if (n <= options.naive_max_n) {
          for (unsigned r = 0; r < options.runs; ++r) {
            naive.push_back(seconds([&] { (void)fss_full_domain_naive(keys[0]); }));
          }
          row.naive_full_eval_time = median(naive);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string fss_bench_csv(const std::vector<FssBenchRow>& rows) {
  std::string out =
      "mu_mode,n,p,mu,nu,gen_time,naive_full_eval_time,optimized_full_eval_time,speedup,key_bytes\n";
  for (const FssBenchRow& r : rows) {
    std::optional<double> speedup;
    if (r.naive_full_eval_time) speedup = *r.naive_full_eval_time / r.optimized_full_eval_time;
    out += r.mu_mode + "," + std::to_string(r.n) + "," + std::to_string(r.p) + "," +
           std::to_string(r.mu) + "," + std::to_string(r.nu) + "," + fmt(r.gen_time) + "," +
           fmt(r.naive_full_eval_time, "NA") + "," + fmt(r.optimized_full_eval_time) + "," +
           fmt(speedup, "NA") + "," + std::to_string(r.key_bytes) + "\n";
  }
  return out;
}

std::vector<VerifyBenchRow> bench_verify(const VerifyBenchOptions& options) {
  if (options.runs == 0) throw ConfigError("runs must be positive");
  constexpr std::array kinds{BlindingKind::square, BlindingKind::product, BlindingKind::inverse};
  std::vector<VerifyBenchRow> rows;
  Rng rng = derive_rng(options.seed, {0xB1});
  for (unsigned p : options.p) {
    for (std::uint64_t n : options.n) {
      std::vector<FieldElement> u(n, FieldElement::zero());
      u[uniform_below(rng, n)] = FieldElement::one();
      const auto shares = additive_share<FieldElement>(u, p, rng);

      std::array<std::vector<double>, 3> times;
      std::array<unsigned, 3> slowest{};
      for (unsigned run = 0; run < options.runs; ++run) {
        std::array<double, 3> t{};
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          bool ok = false;
          t[k] = seconds([&] {
            const auto r = make_blinding<FieldElement>(kinds[k], n, p, rng);
            std::vector<BlindedShare<FieldElement>> blinded;
            for (const auto& share : shares) blinded.push_back(blind<FieldElement>(r, share));
            ok = check<FieldElement>(kinds[k], aggregate<FieldElement>(blinded));
          });
          if (!ok) throw ProtocolAbort("benchmark unit vector failed verification");
          times[k].push_back(t[k]);
        }
        ++slowest[static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin())];
      }
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        const double med = median(times[k]);
        rows.push_back(VerifyBenchRow{p, n, kinds[k], med, 1.0 / med, slowest[k], options.runs});
      }
    }
  }
  return rows;
}

std::string verify_bench_csv(const std::vector<VerifyBenchRow>& rows) {
  std::string out = "p,n,kind,median_time,throughput,slowest_runs,runs\n";
  for (const VerifyBenchRow& r : rows) {
    out += std::to_string(r.p) + "," + std::to_string(r.n) + "," + std::string(to_string(r.kind)) +
           "," + fmt(r.median_time) + "," + fmt(r.throughput) + "," +
           std::to_string(r.slowest_runs) + "," + std::to_string(r.runs) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// command line
// ---------------------------------------------------------------------------

namespace {

void emit(const std::string& content, const std::string& out_dir, const char* filename,
          std::ostream& out) {
  if (out_dir.empty()) {
    out << content;
    return;
  }
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / filename;
  write_file(path, content);
  out << path.string() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Private crowdsourced aggregation simulator"};
  app.require_subcommand(1);

  // simulate
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed_flag, trials_flag;
  std::vector<std::string> overrides;
  auto* sim = app.add_subcommand("simulate", "run epochs from an experiment config");
  sim->add_option("--config", config_path, "experiment JSON")->required();
  sim->add_option("--seed", seed_flag, "master seed (overrides the config)");
  sim->add_option("--trials", trials_flag, "trial count (overrides the config)");
  sim->add_option("--out-dir", out_dir, "directory for trials.csv and summary.json")->required();
  sim->add_option("--override", overrides, "dotted.key=value applied before validation");

  // epsilon
  std::string eps_mechanism = "all", eps_out;
  std::optional<double> pi1, pi2, pi_s, pi_yes, pi_v;
  auto* eps = app.add_subcommand("epsilon", "privacy leakage table");
  eps->add_option("--mechanism", eps_mechanism, "rr, xyz_binary, xyz_multi or all");
  eps->add_option("--pi1", pi1);
  eps->add_option("--pi2", pi2);
  eps->add_option("--pi-s", pi_s);
  eps->add_option("--pi-yes", pi_yes);
  eps->add_option("--pi-v", pi_v);
  eps->add_option("--out-dir", eps_out, "write epsilon.csv here instead of stdout");

  // bench-fss
  FssBenchOptions fss_opts;
  std::string fss_out;
  auto* bfss = app.add_subcommand("bench-fss", "key generation and full-domain evaluation timings");
  bfss->add_option("--n", fss_opts.n, "input bits")->delimiter(',');
  bfss->add_option("--p", fss_opts.p, "party counts")->delimiter(',');
  bfss->add_option("--mu-factor", fss_opts.mu_factors, "row-width multipliers")->delimiter(',');
  bfss->add_option("--m", fss_opts.m, "message bits");
  bfss->add_option("--runs", fss_opts.runs, "timed runs per cell");
  bfss->add_option("--naive-max-n", fss_opts.naive_max_n, "largest n timed naively");
  bfss->add_option("--seed", fss_opts.seed);
  bfss->add_option("--out-dir", fss_out, "write bench_fss.csv here instead of stdout");

  // bench-verify
  VerifyBenchOptions ver_opts;
  std::string ver_out;
  auto* bver = app.add_subcommand("bench-verify", "unit-vector verification timings per kind");
  bver->add_option("--p", ver_opts.p, "party counts")->delimiter(',');
  bver->add_option("--n", ver_opts.n, "vector lengths")->delimiter(',');
  bver->add_option("--runs", ver_opts.runs, "timed runs per cell");
  bver->add_option("--seed", ver_opts.seed);
  bver->add_option("--out-dir", ver_out, "write bench_verify.csv here instead of stdout");

  // discretize
  double lat = 0, lon = 0;
  GridSpec grid;
  auto* disc = app.add_subcommand("discretize", "map a coordinate to its grid cell id");
  disc->add_option("--lat", lat)->required();
  disc->add_option("--lon", lon)->required();
  disc->add_option("--origin-lat", grid.origin_lat)->required();
  disc->add_option("--origin-lon", grid.origin_lon)->required();
  disc->add_option("--cell-miles", grid.cell_miles);
  disc->add_option("--id-bits", grid.id_bits);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*sim) {
      const std::filesystem::path cfg_path(config_path);
      json raw = read_json_file(cfg_path);
      for (const auto& o : overrides) apply_override(raw, o);
      if (seed_flag) raw["seed"] = *seed_flag;
      if (trials_flag) raw["trials"] = *trials_flag;
      const ExperimentConfig config = parse_config(raw);
      const SimulationOutput result = simulate(config, cfg_path.parent_path());
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "trials.csv", trials_csv(result.rows));
      write_file(std::filesystem::path(out_dir) / "summary.json", result.summary.dump(2) + "\n");
      out << (std::filesystem::path(out_dir) / "summary.json").string() << "\n";
    } else if (*eps) {
      std::vector<EpsilonRow> rows;
      if (pi1 || pi2 || pi_s || pi_yes || pi_v) {
        if (eps_mechanism == "all") throw ConfigError("explicit parameters need --mechanism");
        rows.push_back(epsilon_point(EpsilonRow{eps_mechanism, pi1, pi2, pi_s, pi_yes, pi_v, {}}));
      } else {
        rows = epsilon_sweep(eps_mechanism);
      }
      emit(epsilon_csv(rows), eps_out, "epsilon.csv", out);
    } else if (*bfss) {
      emit(fss_bench_csv(bench_fss(fss_opts)), fss_out, "bench_fss.csv", out);
    } else if (*bver) {
      emit(verify_bench_csv(bench_verify(ver_opts)), ver_out, "bench_verify.csv", out);
    } else if (*disc) {
      out << discretize(lat, lon, grid) << "\n";
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParams& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpecError& e) {
    err << "invalid population: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfGrid& e) {
    err << "out of grid: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "aborted: " << e.what() << "\n";
    return kExitAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace privagg::cli
