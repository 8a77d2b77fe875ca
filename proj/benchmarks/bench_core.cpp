#include <benchmark/benchmark.h>

#include "sag/delay_game.hpp"
#include "sag/goodput_game.hpp"
#include "sag/lambert_w.hpp"
#include "sag/monte_carlo.hpp"
#include "sag/spatial_model.hpp"

namespace {

void BM_LambertPrincipal(benchmark::State& state) {
  double x = -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::lambert_w(x));
    x = x < 40.0 ? x + 0.37 : -0.3;
  }
}
BENCHMARK(BM_LambertPrincipal);

void BM_LambertMinus1(benchmark::State& state) {
  double x = -0.36;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::lambert_w(x, sag::Branch::Minus1));
    x = x < -1e-3 ? x * 0.97 : -0.36;
  }
}
BENCHMARK(BM_LambertMinus1);

void BM_GoodputIntegral(benchmark::State& state) {
  sag::NetworkParams params;
  params.beta = 2.5 + 0.5 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::goodput_integral(0.5, params));
  }
}
BENCHMARK(BM_GoodputIntegral)->DenseRange(0, 4);

void BM_DelayPoA(benchmark::State& state) {
  const sag::ContentionModel m{1.0, 3.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::delay::poa(18.0, m));
  }
}
BENCHMARK(BM_DelayPoA);

void BM_Replicator(benchmark::State& state) {
  const sag::ContentionModel m{1.0, 3.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::goodput::replicator_trajectory(0.5, 0.5, m, 100.0, 0.01));
  }
}
BENCHMARK(BM_Replicator)->Unit(benchmark::kMillisecond);

void BM_Coverage(benchmark::State& state) {
  sag::NetworkParams params;
  params.lambda = 0.2;
  sag::mc::SimConfig sim;
  sim.n_samples = 10000;
  sim.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sag::mc::estimate_coverage(params, 0.5, sim));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.n_samples));
}
BENCHMARK(BM_Coverage)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
