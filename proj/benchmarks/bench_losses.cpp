#include <benchmark/benchmark.h>

#include "ngr/datagen.hpp"
#include "ngr/nested.hpp"

namespace {

using namespace ngr;

// Loss and gradient of the unsupervised objective on fig3/table1-sized data.
template <FieldScalar S>
void BM_UnsupervisedLoss(benchmark::State& state) {
  SynthConfig cfg;
  cfg.ambient_dim = state.range(0);
  cfg.planted_dim = state.range(1);
  cfg.subspace_dim = state.range(2);
  cfg.sigma = 0.5;
  const auto pts = generate<S>(cfg).points;
  Rng rng(4);
  const ProductPoint<S> x{sample_stiefel_uniform<S>(cfg.ambient_dim, cfg.planted_dim, rng).basis(),
                          gaussian_matrix<S>(cfg.ambient_dim, cfg.subspace_dim, rng)};
  const auto metric = static_cast<Metric>(state.range(3));
  for (auto _ : state) benchmark::DoNotOptimize(loss_unsupervised<S>(x, pts, metric));
}

void BM_SupervisedLoss(benchmark::State& state) {
  SynthConfig cfg;
  cfg.num_points = static_cast<Index>(state.range(0));
  const auto data = generate_two_class<double>(cfg, 0.2);
  const auto& pts = data.data.points;
  const AffinityMatrix aff = build_affinity(data.labels, distance_matrix<double>(pts, Metric::projection), 5, 5);
  Rng rng(5);
  const Mat<double> a = sample_stiefel_uniform<double>(10, 3, rng).basis();
  for (auto _ : state) benchmark::DoNotOptimize(loss_supervised<double>(a, pts, aff, Metric::projection));
}

}  // namespace

BENCHMARK(BM_UnsupervisedLoss<double>)
    ->Args({10, 3, 1, static_cast<int>(ngr::Metric::projection)})
    ->Args({10, 3, 1, static_cast<int>(ngr::Metric::geodesic)})
    ->Args({30, 20, 2, static_cast<int>(ngr::Metric::projection)});
BENCHMARK(BM_UnsupervisedLoss<ngr::Complex>)->Args({10, 3, 1, static_cast<int>(ngr::Metric::projection)});
BENCHMARK(BM_SupervisedLoss)->Arg(40)->Arg(100);

BENCHMARK_MAIN();
