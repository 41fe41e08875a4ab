#include <benchmark/benchmark.h>

#include "msr/channel.hpp"
#include "msr/corpus.hpp"
#include "msr/metrics.hpp"

using namespace msr;

static void BM_Ssim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = corpus::texture(n);
  const auto b = degrade(a, DegradePreset::ln(), ChannelSeed{1});
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256)->Arg(512);

static void BM_Psnr(benchmark::State& state) {
  const auto a = corpus::texture(256);
  const auto b = degrade(a, DegradePreset::ln(), ChannelSeed{1});
  for (auto _ : state) benchmark::DoNotOptimize(psnr(a, b));
}
BENCHMARK(BM_Psnr);

static void BM_Degrade(benchmark::State& state) {
  const auto img = corpus::texture(256);
  const auto preset = state.range(0) == 0 ? DegradePreset::ln() : DegradePreset::hn();
  for (auto _ : state) benchmark::DoNotOptimize(degrade(img, preset, ChannelSeed{3}));
}
BENCHMARK(BM_Degrade)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
