#include <benchmark/benchmark.h>

#include "msr/corpus.hpp"
#include "msr/metagen.hpp"

using namespace msr;

static void BM_Canny(benchmark::State& state) {
  const auto img = corpus::glyphs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(canny(img, CannyParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_Canny)->Arg(64)->Arg(256)->Arg(512);

static void BM_SparsitySweep(benchmark::State& state) {
  const auto img = corpus::glyphs(256);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_sparsity(img, CannyParams{}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SparsitySweep)->Arg(2)->Arg(5);

static void BM_Gradient2Bit(benchmark::State& state) {
  const auto img = corpus::texture(256);
  for (auto _ : state) benchmark::DoNotOptimize(gradient_2bit(img, 1.0));
}
BENCHMARK(BM_Gradient2Bit);

static void BM_PoolExpand(benchmark::State& state) {
  const auto m = canny(corpus::glyphs(256), CannyParams{});
  const int f = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(expand_metadata(downsample_metadata(m, f), 256, 256));
}
BENCHMARK(BM_PoolExpand)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
