#include <benchmark/benchmark.h>

#include "vru/avoidance.hpp"
#include "vru/pipeline.hpp"
#include "vru/severity.hpp"
#include "vru/simulator.hpp"

namespace {

void BM_BetaQuantile(benchmark::State& state) {
  const vru::BetaParams p{22.0, 11.0};
  double q = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vru::beta_quantile(p, q));
    q = q < 0.9 ? q + 0.01 : 0.05;
  }
}
BENCHMARK(BM_BetaQuantile);

void BM_RunCounterfactual(benchmark::State& state) {
  const auto crashes = vru::generate_synthetic_usecase(vru::UseCase::kUC1, 32, 7);
  const vru::SimConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vru::run_counterfactual(crashes[i % crashes.size()], vru::Algorithm::kA2, config));
    ++i;
  }
}
BENCHMARK(BM_RunCounterfactual);

void BM_FitOrderedProbit(benchmark::State& state) {
  const auto persons = vru::generate_synthetic_persons(
      vru::VruType::kCyclist, static_cast<int>(state.range(0)), 11,
      vru::PersonPopulation::kInDepth);
  for (auto _ : state) benchmark::DoNotOptimize(vru::fit_ordered_probit(persons));
}
BENCHMARK(BM_FitOrderedProbit)->Arg(1500)->Arg(5000);

void BM_BatchSimulate(benchmark::State& state) {
  const auto crashes = vru::generate_synthetic_usecase(vru::UseCase::kUC5, 256, 3);
  const vru::SimConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vru::batch_simulate(crashes, vru::Algorithm::kA1, config,
                                                 static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_BatchSimulate)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
