#include <benchmark/benchmark.h>

#include "ngr/manifold.hpp"

namespace {

using namespace ngr;

template <FieldScalar S>
void BM_GeodesicDistance(benchmark::State& state) {
  const Index n = state.range(0);
  const Index p = state.range(1);
  Rng rng(1);
  const auto x = sample_stiefel_uniform<S>(n, p, rng);
  const auto y = sample_stiefel_uniform<S>(n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_distance(x, y));
}

template <FieldScalar S>
void BM_ProjectionDistance(benchmark::State& state) {
  const Index n = state.range(0);
  const Index p = state.range(1);
  Rng rng(1);
  const auto x = sample_stiefel_uniform<S>(n, p, rng);
  const auto y = sample_stiefel_uniform<S>(n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(projection_distance(x, y));
}

template <FieldScalar S>
void BM_ExpLog(benchmark::State& state) {
  const Index n = state.range(0);
  const Index p = state.range(1);
  Rng rng(2);
  const auto x = sample_stiefel_uniform<S>(n, p, rng);
  const auto y = sample_stiefel_uniform<S>(n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(log_map(x, y)));
}

template <FieldScalar S>
void BM_FrechetMean(benchmark::State& state) {
  Rng rng(3);
  const auto centre = sample_stiefel_uniform<S>(10, 2, rng);
  std::vector<GrassmannPoint<S>> pts;
  for (int i = 0; i < state.range(0); ++i)
    pts.push_back(exp_map(centre, Mat<S>(0.3 * random_unit_tangent(centre, rng).mat())));
  for (auto _ : state) benchmark::DoNotOptimize(frechet_mean<S>(pts));
}

}  // namespace

BENCHMARK(BM_GeodesicDistance<double>)->Args({10, 1})->Args({10, 2})->Args({30, 2})->Args({249, 1});
BENCHMARK(BM_GeodesicDistance<ngr::Complex>)->Args({10, 2})->Args({99, 1});
BENCHMARK(BM_ProjectionDistance<double>)->Args({10, 1})->Args({10, 2})->Args({30, 2});
BENCHMARK(BM_ExpLog<double>)->Args({10, 2})->Args({30, 2});
BENCHMARK(BM_FrechetMean<double>)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
