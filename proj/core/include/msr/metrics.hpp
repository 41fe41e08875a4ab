#pragma once

#include <limits>

#include "msr/pixelcore.hpp"

namespace msr {

// Identical images have no finite PSNR; this sentinel stands in for it.
inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

struct MetricReport {
  double mse = 0.0;
  double psnr = kPsnrInfinity;
  double ssim = 1.0;
};

double mse(const ImagePlane& a, const ImagePlane& b);

// 10 log10(255^2 / mse); kPsnrInfinity when mse == 0.
double psnr(const ImagePlane& a, const ImagePlane& b);

// Gaussian-window SSIM: 11x11 window, sigma 1.5, K1 0.01, K2 0.03, L 255,
// averaged over every window position fully inside the image.
double ssim(const ImagePlane& a, const ImagePlane& b);

MetricReport evaluate(const ImagePlane& reference, const ImagePlane& test);

// Mean absolute difference of temporal differences, averaged over pixels and
// over frame pairs i = 2..n.
double frame_diff_loss(const FrameSequence& a, const FrameSequence& b);

}  // namespace msr
