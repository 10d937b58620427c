// Serial reference kernels against their OpenMP versions, plus the per-input
// naive FSS evaluation the optimized one replaces.

#include <benchmark/benchmark.h>

#include "privagg/fss.hpp"
#include "privagg/harness.hpp"
#include "privagg/verify.hpp"

namespace {

using namespace privagg;

FssKey make_key(unsigned n, unsigned p) {
  Rng rng(n * 31 + p);
  const FssParams params = FssParams::with_defaults(n, p, 32);
  return fss_gen(PointFunction{params.domain_size() / 3, 0xABCD}, params, rng)[0];
}

void BM_FssNaive(benchmark::State& state) {
  const FssKey key = make_key(static_cast<unsigned>(state.range(0)), static_cast<unsigned>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fss_full_domain_naive(key));
}

void BM_FssSerial(benchmark::State& state) {
  const FssKey key = make_key(static_cast<unsigned>(state.range(0)), static_cast<unsigned>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fss_evaluate_share_serial(key));
}

void BM_FssParallel(benchmark::State& state) {
  const FssKey key = make_key(static_cast<unsigned>(state.range(0)), static_cast<unsigned>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fss_evaluate_share(key));
}

void fss_shapes(benchmark::internal::Benchmark* b, int max_n) {
  for (int p : {2, 3, 4}) {
    for (int n = 10; n <= max_n; n += 2) b->Args({n, p});
  }
  b->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_FssNaive)->Apply([](auto* b) { fss_shapes(b, 14); });
BENCHMARK(BM_FssSerial)->Apply([](auto* b) { fss_shapes(b, 20); });
BENCHMARK(BM_FssParallel)->Apply([](auto* b) { fss_shapes(b, 20); });

void BM_Verify(benchmark::State& state) {
  const auto kind = static_cast<BlindingKind>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = static_cast<unsigned>(state.range(2));
  Rng rng(7);
  std::vector<FieldElement> u(n);
  u[n / 2] = FieldElement::one();
  const auto shares = additive_share<FieldElement>(u, p, rng);
  for (auto _ : state) {
    const auto r = make_blinding<FieldElement>(kind, n, p, rng);
    std::vector<BlindedShare<FieldElement>> blinded;
    for (const auto& v : shares) blinded.push_back(blind<FieldElement>(r, v));
    benchmark::DoNotOptimize(verify_owner<FieldElement>(blinded, kind, p));
  }
  state.SetLabel(std::string(to_string(kind)));
}

BENCHMARK(BM_Verify)
    ->ArgsProduct({{0, 1, 2}, {1024, 16384}, {3, 5}})
    ->Unit(benchmark::kMicrosecond);

void BM_Epoch(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Exec::serial : Exec::parallel;
  Rng rng(11);
  const Population pop = generate_population(PopulationSpec{static_cast<std::uint64_t>(state.range(1)), {{1, 50}}}, rng);
  EpochConfig c;
  c.mech.kind = MechanismKind::xyz_binary;
  c.mech.query_value = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_epoch(pop, c, EpochOptions{exec, {}}));
  state.SetLabel(exec == Exec::serial ? "serial" : "parallel");
}

BENCHMARK(BM_Epoch)->ArgsProduct({{0, 1}, {500, 2000}})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
