#include <benchmark/benchmark.h>

#include "ngr/baselines.hpp"
#include "ngr/datagen.hpp"
#include "ngr/nested.hpp"

namespace {

using namespace ngr;

void BM_FitUnsupervised(benchmark::State& state) {
  SynthConfig cfg;
  cfg.sigma = 1.0;
  const auto pts = generate<double>(cfg).points;
  FitConfig fit;
  fit.metric = static_cast<Metric>(state.range(0));
  for (auto _ : state) {
    Rng rng(6);
    benchmark::DoNotOptimize(fit_unsupervised<double>(pts, 3, fit, rng));
  }
}

void BM_Pga(benchmark::State& state) {
  SynthConfig cfg;
  cfg.ambient_dim = 30;
  cfg.planted_dim = 20;
  cfg.subspace_dim = 2;
  const auto pts = generate<double>(cfg).points;
  for (auto _ : state) benchmark::DoNotOptimize(pga_fit<double>(pts, 10));
}

}  // namespace

BENCHMARK(BM_FitUnsupervised)
    ->Arg(static_cast<int>(ngr::Metric::projection))
    ->Arg(static_cast<int>(ngr::Metric::geodesic))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pga)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
