#include <benchmark/benchmark.h>

#include "msr/basecodec.hpp"
#include "msr/bilevelcodec.hpp"
#include "msr/corpus.hpp"
#include "msr/metagen.hpp"

using namespace msr;

static void BM_BaseEncode(benchmark::State& state) {
  const auto img = corpus::texture(static_cast<int>(state.range(0)));
  const QualityFactor q(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(base_encode(img, q));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_BaseEncode)->Args({64, 75})->Args({256, 75})->Args({256, 10})->Args({256, 95});

static void BM_BaseDecode(benchmark::State& state) {
  const auto img = corpus::texture(static_cast<int>(state.range(0)));
  const auto stream = base_encode(img, QualityFactor(75));
  for (auto _ : state) benchmark::DoNotOptimize(base_decode(stream));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_BaseDecode)->Arg(64)->Arg(256);

static void BM_MetaEncode(benchmark::State& state) {
  const auto m = canny(corpus::glyphs(static_cast<int>(state.range(0))), CannyParams{});
  for (auto _ : state) benchmark::DoNotOptimize(meta_encode(m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}
BENCHMARK(BM_MetaEncode)->Arg(64)->Arg(256)->Arg(512);

static void BM_MetaDecode(benchmark::State& state) {
  const auto stream = meta_encode(canny(corpus::glyphs(static_cast<int>(state.range(0))), CannyParams{}));
  for (auto _ : state) benchmark::DoNotOptimize(meta_decode(stream));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.width) * stream.height);
}
BENCHMARK(BM_MetaDecode)->Arg(64)->Arg(256)->Arg(512);

static void BM_MetaEncodeDepth2(benchmark::State& state) {
  const auto m = gradient_2bit(corpus::texture(256), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(meta_encode(m));
}
BENCHMARK(BM_MetaEncodeDepth2);

BENCHMARK_MAIN();
