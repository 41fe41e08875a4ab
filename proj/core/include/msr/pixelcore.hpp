#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "msr/bytes.hpp"

namespace msr {

// Round half away from zero. This is the only rounding rule used when a float
// intermediate is stored back into 8-bit samples.
inline double round_half_away(double v) { return std::round(v); }

inline std::uint8_t to_u8(double v) {
  double r = round_half_away(v);
  if (r < 0.0) return 0;
  if (r > 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

// Row-major 8-bit raster.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int width, int height, std::uint8_t fill = 0);
  ImagePlane(int width, int height, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[index(x, y)]; }

  // Edge-clamped read; coordinates outside the raster snap to the border.
  std::uint8_t clamped(int x, int y) const;

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// One (grayscale) or three (RGB) planes of identical dimensions.
class ImageFrame {
 public:
  ImageFrame() = default;
  explicit ImageFrame(ImagePlane gray);
  explicit ImageFrame(std::vector<ImagePlane> planes);

  int width() const noexcept { return planes_.front().width(); }
  int height() const noexcept { return planes_.front().height(); }
  std::size_t plane_count() const noexcept { return planes_.size(); }
  bool is_gray() const noexcept { return planes_.size() == 1; }

  const ImagePlane& plane(std::size_t i) const { return planes_.at(i); }
  const std::vector<ImagePlane>& planes() const noexcept { return planes_; }

  friend bool operator==(const ImageFrame&, const ImageFrame&) = default;

 private:
  std::vector<ImagePlane> planes_;
};

// Ordered frames of identical dimensions, n >= 1.
class FrameSequence {
 public:
  explicit FrameSequence(std::vector<ImagePlane> frames);

  std::size_t size() const noexcept { return frames_.size(); }
  const ImagePlane& operator[](std::size_t i) const { return frames_[i]; }
  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }

 private:
  std::vector<ImagePlane> frames_;
};

// Row-major float raster used for intermediate arithmetic.
struct FloatPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  FloatPlane() = default;
  FloatPlane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  double clamped(int x, int y) const;
};

FloatPlane to_float(const ImagePlane& plane);
ImagePlane to_plane(const FloatPlane& plane);

// Binary PGM (P5) or PPM (P6), maxval 255. Comments and any whitespace are
// accepted in the header; save_pnm always writes the canonical form
// "P5\n<w> <h>\n255\n".
ImageFrame load_pnm(std::span<const std::uint8_t> bytes);
Bytes save_pnm(const ImageFrame& frame);

// BT.601 luma, rounded half away from zero. Grayscale frames pass through.
ImagePlane to_grayscale(const ImageFrame& frame);

// Top-left width x height window; both must fit inside the plane.
ImagePlane crop(const ImagePlane& plane, int width, int height);

enum class ResampleKernel { nearest, bicubic };

// Pixel-center aligned resampling. Bicubic is Catmull-Rom (a = -0.5) with
// edge-clamped taps and no anti-alias widening when shrinking.
ImagePlane resample(const ImagePlane& plane, int new_width, int new_height,
                    ResampleKernel kernel);
FloatPlane resample_float(const FloatPlane& plane, int new_width, int new_height,
                          ResampleKernel kernel);

// Catmull-Rom cubic weight for tap distance t.
double catmull_rom(double t);

// Separable convolution with a symmetric odd-length kernel, edge-clamped.
FloatPlane convolve_separable(const FloatPlane& plane, std::span<const double> kernel);

// Normalized Gaussian samples exp(-i^2 / 2 sigma^2) for i in [-size/2, size/2].
std::vector<double> gaussian_kernel(double sigma, int size);

}  // namespace msr
