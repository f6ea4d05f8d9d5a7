#include <benchmark/benchmark.h>

#include "wavedelay/contour.hpp"
#include "wavedelay/pdesim.hpp"
#include "wavedelay/regions.hpp"

using namespace wavedelay;

static void BM_SimStep(benchmark::State& state) {
  SimConfig cfg;
  cfg.tau = Rational::make(2, 1);
  cfg.gains = {-0.25, -0.25};
  cfg.cells_per_unit = static_cast<int>(state.range(0));
  SimState s = init(cfg);
  for (auto _ : state) {
    step(s, cfg);
    benchmark::DoNotOptimize(s.p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.p.size() + s.w.size()));
}
BENCHMARK(BM_SimStep)->Arg(64)->Arg(256)->Arg(1024);

static void BM_WindingRect(benchmark::State& state) {
  const ExpPoly f = char_function(DelaySystem::equal_gains(-0.3, 2.05));
  const double h = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(winding_rect(f, {-1e-7, 1.0, -h, h}));
}
BENCHMARK(BM_WindingRect)->Arg(25)->Arg(100)->Arg(400);

static void BM_SpectralAbscissa(benchmark::State& state) {
  const auto sys = DelaySystem::equal_gains(0.25, Rational::make(static_cast<int64_t>(state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_abscissa(sys));
}
BENCHMARK(BM_SpectralAbscissa)->Arg(2)->Arg(4)->Arg(8);

static void BM_Classify(benchmark::State& state) {
  const auto sys = DelaySystem::equal_gains(0.25, Rational::make(static_cast<int64_t>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(classify(sys));
}
BENCHMARK(BM_Classify)->Arg(4)->Arg(40)->Arg(400);

BENCHMARK_MAIN();
