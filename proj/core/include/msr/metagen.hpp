#pragma once

#include <cstdint>
#include <vector>

#include "msr/pixelcore.hpp"

namespace msr {

// Side-information raster aligned to the HR grid. Sites are stored unpacked,
// one byte per site, each value < 2^depth.
class MetadataPlane {
 public:
  MetadataPlane() = default;
  MetadataPlane(int width, int height, int depth);
  MetadataPlane(int width, int height, int depth, std::vector<std::uint8_t> sites);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return sites_.size(); }

  std::uint8_t at(int x, int y) const { return sites_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v);

  const std::vector<std::uint8_t>& sites() const noexcept { return sites_; }
  std::size_t count_nonzero() const noexcept;
  double density() const noexcept;

  friend bool operator==(const MetadataPlane&, const MetadataPlane&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int depth_ = 1;
  std::vector<std::uint8_t> sites_;
};

// Thresholds apply to the raw Sobel magnitude of 0-255 intensities.
struct CannyParams {
  double gauss_sigma = 1.4;
  double low_thresh = 40.0;
  double high_thresh = 100.0;

  void validate() const;
};

// Gaussian-smoothed Sobel field shared by canny, the sparsity sweep and the
// 2-bit quantizer.
struct GradientField {
  FloatPlane magnitude;
  FloatPlane gx;
  FloatPlane gy;
};

GradientField gradient_field(const ImagePlane& plane, double sigma);

// Non-maximum suppression survivors: 1 where the site is a local maximum
// across the quantized gradient direction and magnitude > 0.
MetadataPlane non_max_suppression(const GradientField& g);

// Double-threshold hysteresis over NMS survivors with 8-connected linking.
MetadataPlane hysteresis(const GradientField& g, const MetadataPlane& nms, double low,
                         double high);

MetadataPlane canny(const ImagePlane& plane, const CannyParams& params);

struct SparsitySweep {
  std::vector<MetadataPlane> maps;
  std::vector<CannyParams> params;
  bool all_empty = false;  // warning, not an error
};

// Level i uses thresholds (low, high) * ratio^i, so density never increases.
SparsitySweep sweep_sparsity(const ImagePlane& plane, const CannyParams& base, int levels,
                             double ratio = 1.5);

// Fixed 4-level quantizer on smoothed Sobel magnitude.
inline constexpr double kGrad2Thresholds[3] = {16.0, 48.0, 112.0};
MetadataPlane gradient_2bit(const ImagePlane& plane, double sigma);

// factor x factor block pooling (OR for depth 1, max for depth 2). Partial
// blocks at the right/bottom edge pool over the sites that exist.
MetadataPlane downsample_metadata(const MetadataPlane& m, int factor);

// Block replication back onto a width x height grid; inverse placement of
// downsample_metadata. The factor is the smallest one consistent with both
// dimensions, which is exact whenever the pooling factor divides them.
MetadataPlane expand_metadata(const MetadataPlane& m, int width, int height);

// Depth-2 maps become bi-level by keeping levels >= min_level.
MetadataPlane binarize(const MetadataPlane& m, int min_level);

// Debug export: 0/255 for depth 1, 0/85/170/255 for depth 2.
ImagePlane metadata_to_plane(const MetadataPlane& m);

}  // namespace msr
