// Parallel kernels against their serial references.
//
//   OMP_NUM_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include "nef/estimation.hpp"
#include "nef/rng.hpp"
#include "nef/study.hpp"

namespace {

const nef::NefParams kTruth{3.0, 4.0, 2.0};

nef::MixingFamily family_of(int64_t tag) {
  return tag == 0 ? nef::MixingFamily::gamma() : nef::MixingFamily::inverse_gaussian();
}

std::vector<double> data_for(const nef::MixingFamily& fam, std::size_t n) {
  nef::Rng rng = nef::stream_for(7, 0);
  return nef::sample_nef(kTruth, fam, n, rng);
}

void BM_EStep(benchmark::State& state) {
  const auto fam = family_of(state.range(0));
  const auto data = data_for(fam, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nef::e_step(data, kTruth, fam, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_EStepSerial(benchmark::State& state) {
  const auto fam = family_of(state.range(0));
  const auto data = data_for(fam, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nef::e_step_serial(data, kTruth, fam, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

nef::StudyConfig study_config(int64_t tag) {
  nef::StudyConfig cfg;
  cfg.family = family_of(tag);
  cfg.n = 200;
  cfg.replicas = 16;
  cfg.seed = 7;
  return cfg;
}

void BM_Study(benchmark::State& state) {
  const auto cfg = study_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nef::run_replicas(cfg));
}

void BM_StudySerial(benchmark::State& state) {
  const auto cfg = study_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nef::run_replicas_serial(cfg));
}

}  // namespace

BENCHMARK(BM_EStep)->ArgsProduct({{0, 1}, {1000, 10000}})->UseRealTime();
BENCHMARK(BM_EStepSerial)->ArgsProduct({{0, 1}, {1000, 10000}})->UseRealTime();
BENCHMARK(BM_Study)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StudySerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
