#include <random>

#include <benchmark/benchmark.h>

#include "thermosense/adaptive_protocol.hpp"
#include "thermosense/exact_oracle.hpp"
#include "thermosense/sector_ensemble.hpp"
#include "thermosense/thermo_metrology.hpp"

using namespace thermosense;

static void BM_QfiH(benchmark::State& state) {
  const ChainSpec s = ChainSpec::xx(static_cast<int>(state.range(0)), 1.0, 0.6, 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(qfi_h(s).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_QfiH)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_QfiHXY(benchmark::State& state) {
  const ChainSpec s = ChainSpec::xy(static_cast<int>(state.range(0)), 1.0, 0.9, 0.5, 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(qfi_h(s).value);
}
BENCHMARK(BM_QfiHXY)->RangeMultiplier(10)->Range(100, 100000);

static void BM_ThermalMoments(benchmark::State& state) {
  const ChainSpec s = ChainSpec::xx(static_cast<int>(state.range(0)), 1.0, 0.6, 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(thermal_moments(s));
}
BENCHMARK(BM_ThermalMoments)->RangeMultiplier(10)->Range(100, 100000);

static void BM_ProbeSample(benchmark::State& state) {
  const XxProbe probe(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(probe.sample_jz(1.0, 0.8, 1000.0, 50, rng));
}
BENCHMARK(BM_ProbeSample)->RangeMultiplier(10)->Range(1000, 100000);

static void BM_OracleThermalState(benchmark::State& state) {
  const ChainSpec s = ChainSpec::xy(static_cast<int>(state.range(0)), 1.0, 0.9, 0.5, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::thermal_state(s).log_z);
}
BENCHMARK(BM_OracleThermalState)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_OracleQfi(benchmark::State& state) {
  const ChainSpec s = ChainSpec::xy(static_cast<int>(state.range(0)), 1.0, 0.9, 0.5, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::qfi_spectral(s, Parameter::Field));
}
BENCHMARK(BM_OracleQfi)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_ProtocolRun(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.n_spins = static_cast<int>(state.range(0));
  cfg.floor_policy = FloorPolicy::RunToKmax;
  const XxProbe probe(cfg.n_spins);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_protocol(cfg, probe).iterations.size());
    ++cfg.seed;
  }
}
BENCHMARK(BM_ProtocolRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
