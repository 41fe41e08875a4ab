#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msr/pixelcore.hpp"

namespace msr {

// Transmission-degradation preset. blur_kernel == 1 means no blur and
// noise_sigma == 0 means no noise.
struct DegradePreset {
  std::string name;
  double noise_sigma = 0.0;
  int blur_kernel = 1;
  double blur_sigma = 0.0;

  static DegradePreset nn() { return {"NN", 0.0, 1, 0.0}; }
  static DegradePreset ln() { return {"LN", 10.0, 5, 0.8}; }
  static DegradePreset hn() { return {"HN", 20.0, 7, 1.2}; }

  // Accepts "NN", "LN", "HN"; anything else is a ParameterError.
  static DegradePreset from_name(const std::string& name);

  bool is_identity() const noexcept { return noise_sigma == 0.0 && blur_kernel <= 1; }
  void validate() const;
};

struct ChannelSeed {
  std::uint64_t seed = 0;
};

enum class DegradeOrder { noise_then_blur, blur_then_noise };

// Normalized discrete Gaussian of odd length.
std::vector<double> kernel_1d(double sigma, int size);

// Standard-normal sample for pixel index i under the given seed. Counter based:
// two splitmix64 outputs at stream positions 2i+1 and 2i+2 feed Box-Muller,
// so the value depends only on (seed, i).
double gaussian_noise_at(std::uint64_t seed, std::uint64_t index);

// The float noise field sigma * N(0,1), row-major, before any blur.
FloatPlane noise_field(int width, int height, double sigma, ChannelSeed seed);

// Noise then separable Gaussian blur (edge-clamped), one final rounding.
ImagePlane degrade(const ImagePlane& plane, const DegradePreset& preset, ChannelSeed seed,
                   DegradeOrder order = DegradeOrder::noise_then_blur);

}  // namespace msr
