#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "hwassure/experiment.hpp"
#include "hwassure/powersim.hpp"
#include "hwassure/psc_metrics.hpp"
#include "hwassure/rng.hpp"
#include "hwassure/sat_estimation.hpp"

using namespace hwassure;

namespace {

Circuit load(const std::string& name) {
  return read_bench_file(std::string(HWASSURE_DATA_DIR) + "/benchmarks/" + name + ".bench");
}

void BM_SatAttack(benchmark::State& state, const std::string& design, std::size_t cr, bool wrap) {
  const auto c = load(design);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::uint64_t iterations = 0;
  for (auto _ : state) {
    const auto inst = prepare_attack(c, k, 1, cr, 16, wrap);
    auto oracle = inst.make_oracle();
    const auto r = sat_attack(inst.model, *oracle);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.recovered_key);
  }
  state.counters["dips"] = static_cast<double>(iterations);
}
BENCHMARK_CAPTURE(BM_SatAttack, c432_direct, std::string("c432"), 1, false)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SatAttack, c499_direct, std::string("c499"), 1, false)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SatAttack, c499_scan_cr1, std::string("c499"), 1, true)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SatAttack, c499_scan_cr16, std::string("c499"), 16, true)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SatAttack, s298_syn_cr4, std::string("s298_syn"), 4, false)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ToggleSimulation(benchmark::State& state, const std::string& design) {
  const auto c = load(design);
  const auto cycles = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_circuit_toggles(c, 1, cycles).total);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cycles));
}
BENCHMARK_CAPTURE(BM_ToggleSimulation, s1423_syn, std::string("s1423_syn"))->Arg(11000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ToggleSimulation, s5378_syn, std::string("s5378_syn"))->Arg(11000)->Unit(benchmark::kMillisecond);

void BM_AesSubsystem(benchmark::State& state) {
  const auto pts = random_plaintexts(static_cast<std::size_t>(state.range(0)), 1);
  SubsystemConfig cfg;
  const auto key = parse_block("000102030405060708090a0b0c0d0e0f");
  for (auto _ : state) benchmark::DoNotOptimize(simulate_subsystem(cfg, key, pts).subsystem.samples.size());
}
BENCHMARK(BM_AesSubsystem)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_JsDivergence(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint64_t> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 1000 + rng.below(400);
    b[i] = 1100 + rng.below(400);
  }
  for (auto _ : state) benchmark::DoNotOptimize(js_divergence(a, b, static_cast<std::size_t>(state.range(1))));
}
BENCHMARK(BM_JsDivergence)->Args({1000, 32})->Args({1000, 0})->Args({100000, 32});

void BM_QuadraticFit(benchmark::State& state) {
  const std::vector<std::pair<double, double>> pts{
      {1, 1}, {2, 1.028257}, {4, 3.0492296}, {8, 2.8186724}, {16, 16.9930236}};
  for (auto _ : state) benchmark::DoNotOptimize(fit_quadratic(pts));
}
BENCHMARK(BM_QuadraticFit);

}  // namespace
BENCHMARK_MAIN();
