#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "msr/basecodec.hpp"
#include "msr/bilevelcodec.hpp"
#include "msr/metrics.hpp"
#include "msr/rdo.hpp"

namespace msr {

std::vector<MetaLevel> metadata_levels(const ImagePlane& hr, const MetaSweep& sweep) {
  if (sweep.pools.empty()) throw ParameterError("at least one pooling factor is required");
  for (int f : sweep.pools)
    if (f < 1) throw ParameterError("pooling factor must be >= 1");
  if (sweep.kind != MetaKind::none && sweep.levels < 1) throw ParameterError("metadata levels must be >= 1");

  std::vector<MetaLevel> full;
  switch (sweep.kind) {
    case MetaKind::none:
      return {};
    case MetaKind::canny:
      if (sweep.levels == 1) {
        full.push_back({"canny:L0", canny(hr, sweep.canny)});
      } else {
        auto s = sweep_sparsity(hr, sweep.canny, sweep.levels, sweep.ratio);
        for (int i = 0; i < sweep.levels; ++i) full.push_back({"canny:L" + std::to_string(i), std::move(s.maps[i])});
      }
      break;
    case MetaKind::grad2: {
      // Levels are successive 2x pooling steps of the 2-bit map.
      const auto map = gradient_2bit(hr, sweep.grad_sigma);
      for (int i = 0, f = 1; i < sweep.levels; ++i, f *= 2)
        full.push_back({"grad2:L" + std::to_string(i), downsample_metadata(map, f)});
      break;
    }
  }
  std::vector<MetaLevel> out;
  for (int f : sweep.pools)
    for (const auto& level : full)
      out.push_back({f > 1 ? level.label + "/p" + std::to_string(f) : level.label, downsample_metadata(level.map, f)});
  return out;
}

namespace {

struct ImageSide {
  ImagePlane hr;
  ImagePlane lr;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> meta_bits;
  std::vector<MetadataPlane> received;  // decoded and expanded to the HR grid
};

struct Sample {
  std::uint64_t base_bits = 0;
  std::uint64_t meta_bits = 0;
  double mse = 0.0;
  double ssim = 0.0;
};

ImageSide prepare(const ImagePlane& full, const CurveConfig& cfg) {
  ImageSide s;
  const int w = full.width() / cfg.scale * cfg.scale;
  const int h = full.height() / cfg.scale * cfg.scale;
  if (w < 11 || h < 11) throw ParameterError("corpus image too small for the requested scale");
  s.hr = crop(full, w, h);
  s.lr = cfg.scale == 1 ? s.hr : resample(s.hr, w / cfg.scale, h / cfg.scale, cfg.down_kernel);
  for (auto& level : metadata_levels(s.hr, cfg.meta)) {
    const auto stream = meta_encode(level.map);
    s.labels.push_back(level.label);
    s.meta_bits.push_back(meta_rate(stream));
    s.received.push_back(expand_metadata(meta_decode(stream), w, h));
  }
  return s;
}

// Parallel map over [0, n) with results in index order.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t t = 0; t < count; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

RDCurve build_curve(const std::vector<ImagePlane>& corpus, const CurveConfig& cfg) {
  if (corpus.empty()) throw ParameterError("corpus is empty");
  if (cfg.quality_factors.empty()) throw ParameterError("no quality factors given");
  check_scale(cfg.scale);
  cfg.regime.validate();
  for (int q : cfg.quality_factors) (void)QualityFactor(q);

  const auto registry = ReconstructorRegistry::with_defaults(cfg.edge);
  const Reconstructor& recon = registry.get(cfg.reconstructor);

  std::vector<ImageSide> sides(corpus.size());
  parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) { sides[i] = prepare(corpus[i], cfg); });

  const std::size_t levels = cfg.meta.kind == MetaKind::none ? 1 : sides[0].labels.size();
  const std::size_t nq = cfg.quality_factors.size();
  const std::size_t nimg = corpus.size();
  // samples[(qi * nimg + img) * levels + level]
  std::vector<Sample> samples(nq * nimg * levels);

  parallel_for(nq * nimg, cfg.workers, [&](std::size_t job) {
    const std::size_t qi = job / nimg, img = job % nimg;
    const auto& side = sides[img];
    const auto base = base_encode(side.lr, QualityFactor(cfg.quality_factors[qi]));
    const ChannelSeed seed{cfg.seed.seed + img};
    const ImagePlane lq = degrade(base_decode(base), cfg.regime, seed, cfg.order);

    for (std::size_t l = 0; l < levels; ++l) {
      Sample& s = samples[job * levels + l];
      s.base_bits = rate_of(base);
      const MetadataPlane* m_tilde = nullptr;
      if (cfg.meta.kind != MetaKind::none) {
        s.meta_bits = side.meta_bits[l];
        const auto& m = side.received[l];
        const bool accept = !cfg.use_gate || gate(lq, m, cfg.scale, cfg.tau).v;
        if (accept) m_tilde = &m;
      }
      const ImagePlane sr = recon.reconstruct(lq, m_tilde, cfg.scale);
      s.mse = mse(side.hr, sr);
      s.ssim = ssim(side.hr, sr);
    }
  });

  std::vector<RatePoint> points;
  for (std::size_t qi = 0; qi < nq; ++qi)
    for (std::size_t l = 0; l < levels; ++l) {
      RatePoint p;
      double mse_sum = 0.0, ssim_sum = 0.0;
      for (std::size_t img = 0; img < nimg; ++img) {
        const Sample& s = samples[(qi * nimg + img) * levels + l];
        p.base_bits += s.base_bits;
        p.meta_bits += s.meta_bits;
        mse_sum += s.mse;
        ssim_sum += s.ssim;
      }
      p.total_bits = p.base_bits + p.meta_bits;
      const double mean_mse = mse_sum / static_cast<double>(nimg);
      p.psnr = mean_mse == 0.0 ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(255.0 * 255.0 / mean_mse);
      p.ssim = ssim_sum / static_cast<double>(nimg);
      p.regime = cfg.regime.name;
      p.reconstructor = cfg.reconstructor;
      p.q = cfg.quality_factors[qi];
      p.meta_level = cfg.meta.kind == MetaKind::none ? "none" : sides[0].labels[l];
      p.tau = cfg.tau;
      points.push_back(std::move(p));
    }
  return RDCurve::from_points(cfg.method, std::move(points), cfg.d_kind, cfg.lambda);
}

}  // namespace msr
