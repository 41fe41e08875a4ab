#include "msr/channel.hpp"

#include <cmath>
#include <numbers>

namespace msr {

DegradePreset DegradePreset::from_name(const std::string& name) {
  if (name == "NN") return nn();
  if (name == "LN") return ln();
  if (name == "HN") return hn();
  throw ParameterError("unknown degradation preset '" + name + "' (expected NN, LN or HN)");
}

void DegradePreset::validate() const {
  if (noise_sigma < 0.0) throw ParameterError("noise sigma must be >= 0");
  if (blur_kernel < 1 || blur_kernel % 2 == 0) throw ParameterError("blur kernel must be odd");
  if (blur_kernel > 1 && !(blur_sigma > 0.0)) throw ParameterError("blur sigma must be > 0");
}

std::vector<double> kernel_1d(double sigma, int size) { return gaussian_kernel(sigma, size); }

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double gaussian_noise_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t r1 = mix64(seed + (2 * index + 1) * kGolden);
  const std::uint64_t r2 = mix64(seed + (2 * index + 2) * kGolden);
  const double u1 = static_cast<double>((r1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

FloatPlane noise_field(int width, int height, double sigma, ChannelSeed seed) {
  FloatPlane out(width, height);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = sigma * gaussian_noise_at(seed.seed, i);
  return out;
}

ImagePlane degrade(const ImagePlane& plane, const DegradePreset& preset, ChannelSeed seed,
                   DegradeOrder order) {
  preset.validate();
  if (preset.is_identity()) return plane;

  FloatPlane f = to_float(plane);
  auto add_noise = [&] {
    if (preset.noise_sigma == 0.0) return;
    const auto n = noise_field(f.width, f.height, preset.noise_sigma, seed);
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] += n.data[i];
  };
  auto blur = [&] {
    if (preset.blur_kernel <= 1) return;
    f = convolve_separable(f, kernel_1d(preset.blur_sigma, preset.blur_kernel));
  };
  if (order == DegradeOrder::noise_then_blur) {
    add_noise();
    blur();
  } else {
    blur();
    add_noise();
  }
  return to_plane(f);
}

}  // namespace msr
