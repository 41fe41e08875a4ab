#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msr/bytes.hpp"
#include "msr/channel.hpp"
#include "msr/metagen.hpp"
#include "msr/receiver.hpp"

namespace msr {

enum class DistortionKind { mse, one_minus_ssim };
enum class QualityMetric { psnr, ssim };
// Interpolation coordinates for matched comparisons: rate itself, or log(rate)
// (the Bjontegaard-style variant).
enum class RateAxis { linear, log_rate };

std::string to_string(DistortionKind k);
DistortionKind parse_distortion_kind(const std::string& s);
QualityMetric parse_quality_metric(const std::string& s);

// One operating point. Bits are exact integers summed over the corpus; psnr
// is the PSNR of the corpus-mean MSE and ssim the corpus-mean SSIM.
struct RatePoint {
  std::uint64_t base_bits = 0;
  std::uint64_t meta_bits = 0;
  std::uint64_t total_bits = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::string regime;
  std::string reconstructor;
  int q = 0;
  std::string meta_level = "none";
  double tau = 0.0;

  // MSE recovered from psnr (255^2 / 10^(psnr/10)), or 1 - ssim.
  double distortion(DistortionKind kind) const;
  double quality(QualityMetric m) const { return m == QualityMetric::psnr ? psnr : ssim; }

  friend bool operator==(const RatePoint&, const RatePoint&) = default;
};

struct LagrangianCost {
  double j;
  double d;
  double lambda;
  double r;
};

// J = D + lambda R. lambda and r must be non-negative.
LagrangianCost lagrangian(double d, double lambda, double r);

// Index of the minimum-J point (first one on ties).
std::size_t argmin_cost(std::span<const RatePoint> points, DistortionKind kind, double lambda);

// Points sorted by strictly increasing total_bits, never empty.
class RDCurve {
 public:
  // Sorts by rate; among equal-rate points the lower-distortion one is kept.
  static RDCurve from_points(std::string method, std::vector<RatePoint> points,
                             DistortionKind d_kind, double lambda);

  const std::string& method() const noexcept { return method_; }
  DistortionKind d_kind() const noexcept { return d_kind_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<RatePoint>& points() const noexcept { return points_; }

  friend bool operator==(const RDCurve&, const RDCurve&) = default;

 private:
  std::string method_;
  DistortionKind d_kind_ = DistortionKind::mse;
  double lambda_ = 0.0;
  std::vector<RatePoint> points_;
};

// Pareto-efficient subset: no other point has lower-or-equal rate with
// higher-or-equal quality. Strictly increasing in both rate and quality.
std::vector<RatePoint> operational_envelope(const RDCurve& c, QualityMetric m);

struct Comparison {
  double mean = 0.0;
  double max = 0.0;
  double lo = 0.0;  // shared interval on the matched axis
  double hi = 0.0;
  int samples = 0;
};

inline constexpr int kComparisonGrid = 101;

// Mean and max of (R_ref - R_test) / R_ref * 100 over a uniform grid of the
// shared quality interval.
Comparison bitrate_saving_at_matched_quality(const RDCurve& ref, const RDCurve& test,
                                             QualityMetric metric,
                                             RateAxis axis = RateAxis::linear,
                                             int grid = kComparisonGrid);

// Mean and max of Q_test - Q_ref over a uniform grid of the shared rate
// interval. Quality at rate R is read off the envelope and held flat past its
// last point, so the interval spans each curve's full rate range.
Comparison quality_gain_at_matched_rate(const RDCurve& ref, const RDCurve& test,
                                        QualityMetric metric, RateAxis axis = RateAxis::linear,
                                        int grid = kComparisonGrid);

// ------------------------------------------------------------ curve building

enum class MetaKind { none, canny, grad2 };

struct MetaSweep {
  MetaKind kind = MetaKind::none;
  int levels = 1;
  CannyParams canny{};
  double ratio = 1.5;   // geometric threshold step between canny levels
  std::vector<int> pools{1};  // every level is emitted once per pooling factor
  double grad_sigma = 1.0;
};

std::string to_string(MetaKind k);
MetaKind parse_meta_kind(const std::string& s);

struct CurveConfig {
  std::string method;
  DegradePreset regime = DegradePreset::nn();
  DegradeOrder order = DegradeOrder::noise_then_blur;
  std::string reconstructor = "bicubic";
  EdgeGuidedOptions edge{};
  MetaSweep meta{};
  std::vector<int> quality_factors;
  int scale = 4;
  ResampleKernel down_kernel = ResampleKernel::bicubic;
  ChannelSeed seed{};
  DistortionKind d_kind = DistortionKind::mse;
  double lambda = 0.0;
  double tau = kDefaultTau;
  bool use_gate = true;
  int workers = 1;
};

// The metadata maps a sweep transmits for one HR image, with labels.
struct MetaLevel {
  std::string label;
  MetadataPlane map;
};
std::vector<MetaLevel> metadata_levels(const ImagePlane& hr, const MetaSweep& sweep);

// HR -> metadata -> meta stream; HR -> downsample -> base codec -> channel ->
// gate -> reconstruct -> metrics, for every (q, level). HR images are cropped
// to a multiple of scale. Channel seed for image i is seed + i.
RDCurve build_curve(const std::vector<ImagePlane>& corpus, const CurveConfig& cfg);

// ------------------------------------------------------------ emission

enum class CurveFormat { csv, json };

// CSV columns: method, regime, reconstructor, q, meta_level, tau, base_bits,
// meta_bits, total_bits, psnr_db, ssim, d_kind, lambda, j.
Bytes emit(std::span<const RDCurve> curves, CurveFormat format);
std::vector<RDCurve> parse_curves(std::span<const std::uint8_t> bytes, CurveFormat format);

}  // namespace msr
