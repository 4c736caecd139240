// Timings for the per-trial building blocks, parameterized by N.

#include <array>
#include <random>

#include <benchmark/benchmark.h>

#include "csbm/gcn.hpp"
#include "csbm/linalg.hpp"
#include "csbm/ridge.hpp"
#include "csbm/spectral.hpp"

namespace {

using namespace csbm;

ModelParams params(int N) { return ModelParams::derive(ModelSpec{8.0, 2.0, 0.5, 0.25, N, 40, {}}); }

void BM_SampleCsbm(benchmark::State& state) {
  const ModelParams p = params(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_csbm(p, seed++));
}
BENCHMARK(BM_SampleCsbm)->Arg(400)->Arg(800)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EigOrdered(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  std::normal_distribution<double> z;
  MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = z(rng);
  const std::array<int, 2> ranks{1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(eig_ordered(M, ranks));
}
BENCHMARK(BM_EigOrdered)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_PcaDense(benchmark::State& state) {
  const Dataset ds = sample_csbm(params(static_cast<int>(state.range(0))), 3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pca_dense(ds));
}
BENCHMARK(BM_PcaDense)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_PcaSparse(benchmark::State& state) {
  const Dataset ds = sample_csbm(params(static_cast<int>(state.range(0))), 3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pca_sparse(ds));
}
BENCHMARK(BM_PcaSparse)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Lrr(benchmark::State& state) {
  const Dataset ds = sample_csbm(params(static_cast<int>(state.range(0))), 4);
  const ConvConfig cfg{optimal_rho(ds.params.a_tau, ds.params.b_tau, 0.5, ds.params.q_m), 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(fit_lrr(ds, cfg));
}
BENCHMARK(BM_Lrr)->Arg(800)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_TrainGcn(benchmark::State& state) {
  const Dataset ds = sample_csbm(params(static_cast<int>(state.range(0))), 5);
  for (auto _ : state) {
    Rng rng(6);
    benchmark::DoNotOptimize(train_gcn(ds, {}, ds.params.q_m, rng));
  }
}
BENCHMARK(BM_TrainGcn)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
