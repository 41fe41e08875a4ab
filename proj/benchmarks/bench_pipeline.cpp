#include <benchmark/benchmark.h>

#include "msr/basecodec.hpp"
#include "msr/channel.hpp"
#include "msr/corpus.hpp"
#include "msr/metagen.hpp"
#include "msr/rdo.hpp"
#include "msr/receiver.hpp"

using namespace msr;

static void BM_Reconstruct(benchmark::State& state) {
  const auto hr = corpus::steps(256);
  const auto lq = degrade(base_decode(base_encode(resample(hr, 64, 64, ResampleKernel::bicubic), QualityFactor(50))),
                          DegradePreset::hn(), ChannelSeed{1});
  const auto m = canny(hr, CannyParams{});
  const auto reg = ReconstructorRegistry::with_defaults();
  const std::string id = state.range(0) == 0 ? "bicubic" : "edgeguided";
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(reg, id, lq, &m, 4));
}
BENCHMARK(BM_Reconstruct)->Arg(0)->Arg(1);

static void BM_Gate(benchmark::State& state) {
  const auto hr = corpus::glyphs(256);
  const auto lq = resample(hr, 64, 64, ResampleKernel::bicubic);
  const auto m = canny(hr, CannyParams{});
  for (auto _ : state) benchmark::DoNotOptimize(gate(lq, m, 4, kDefaultTau));
}
BENCHMARK(BM_Gate);

static void BM_BuildCurve(benchmark::State& state) {
  const std::vector<ImagePlane> images{corpus::steps(128), corpus::glyphs(128)};
  CurveConfig cfg;
  cfg.regime = DegradePreset::hn();
  cfg.reconstructor = "edgeguided";
  cfg.quality_factors = {30, 70};
  cfg.meta.kind = MetaKind::canny;
  cfg.meta.levels = 2;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_curve(images, cfg));
}
BENCHMARK(BM_BuildCurve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
