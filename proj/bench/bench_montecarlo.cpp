// Serial reference vs OpenMP run_scenario on a Setting I scenario.

#include <benchmark/benchmark.h>

#include "cape/montecarlo.hpp"

namespace {

cape::Scenario bench_scenario(std::int64_t replicates) {
  cape::Scenario s;
  s.setting = cape::Setting::I;
  s.rates = cape::setting_rates(s.setting);
  s.pi = 0.05;
  s.pi0 = cape::mid_grid_pi0(s.setting, s.pi);
  s.n = 2000;
  s.replicates = replicates;
  s.intervals = {cape::IntervalMethod::CpRstar1, cape::IntervalMethod::CpR01,
                 cape::IntervalMethod::AsymptoticCmle};
  return s;
}

void BM_Serial(benchmark::State& state) {
  const auto s = bench_scenario(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cape::run_scenario_serial(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OpenMP(benchmark::State& state) {
  const auto s = bench_scenario(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(cape::run_scenario(s, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)
    ->Args({2000, 1})
    ->Args({2000, 2})
    ->Args({2000, 4})
    ->Args({2000, 8})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
