#include <cmath>
#include <numeric>

#include "doctest.h"
#include "msr/channel.hpp"
#include "msr/corpus.hpp"
#include "msr/errors.hpp"
#include "msr/metrics.hpp"

using namespace msr;

namespace {

// Direct k x k convolution with the outer-product kernel, edge clamped.
ImagePlane oracle_blur(const ImagePlane& in, int k, double sigma) {
  const int r = k / 2;
  std::vector<double> w1(k);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += (w1[i + r] = std::exp(-(i * i) / (2 * sigma * sigma)));
  for (auto& v : w1) v /= sum;
  ImagePlane out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) acc += w1[i + r] * w1[j + r] * in.clamped(x + i, y + j);
      out.at(x, y) = to_u8(acc);
    }
  return out;
}

double field_std(const FloatPlane& f) {
  const double n = static_cast<double>(f.data.size());
  const double mean = std::accumulate(f.data.begin(), f.data.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : f.data) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

}  // namespace

TEST_CASE("presets carry the published parameters") {
  const auto ln = DegradePreset::ln();
  CHECK(ln.noise_sigma == 10.0);
  CHECK(ln.blur_kernel == 5);
  CHECK(ln.blur_sigma == 0.8);
  const auto hn = DegradePreset::hn();
  CHECK(hn.noise_sigma == 20.0);
  CHECK(hn.blur_kernel == 7);
  CHECK(hn.blur_sigma == 1.2);
  CHECK(DegradePreset::nn().is_identity());
  CHECK(DegradePreset::from_name("HN").name == "HN");
  CHECK_THROWS_AS(DegradePreset::from_name("MN"), ParameterError);
  CHECK_THROWS_AS((DegradePreset{"x", 1.0, 4, 1.0}.validate()), ParameterError);
  CHECK_THROWS_AS((DegradePreset{"x", -1.0, 3, 1.0}.validate()), ParameterError);
}

TEST_CASE("kernel_1d") {
  CHECK(kernel_1d(2.0, 1) == std::vector<double>{1.0});
  const auto k = kernel_1d(0.8, 5);
  CHECK(k[2] == doctest::Approx(0.499116).epsilon(1e-6));
  for (int i = 0; i < 5; ++i) CHECK(k[i] == k[4 - i]);
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(kernel_1d(1.0, 4), ParameterError);
  CHECK_THROWS_AS(kernel_1d(0.0, 3), ParameterError);
}

TEST_CASE("NN is the identity") {
  for (const auto& item : corpus::all(64))
    CHECK(degrade(item.image, DegradePreset::nn(), ChannelSeed{5}) == item.image);
}

TEST_CASE("pre-blur noise std is within 5 percent") {
  for (double sigma : {10.0, 20.0}) {
    const auto f = noise_field(256, 256, sigma, ChannelSeed{17});
    CHECK(std::fabs(field_std(f) - sigma) <= 0.05 * sigma);

    const ImagePlane gray(256, 256, 128);
    const auto noisy = degrade(gray, DegradePreset{"noise", sigma, 1, 0.0}, ChannelSeed{17});
    FloatPlane diff(256, 256);
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x) diff.at(x, y) = noisy.at(x, y) - 128.0;
    CHECK(std::fabs(field_std(diff) - sigma) <= 0.05 * sigma);
  }
}

TEST_CASE("noise is keyed by (seed, index)") {
  const auto f = noise_field(13, 7, 3.0, ChannelSeed{99});
  for (int i = 0; i < 13 * 7; ++i) CHECK(f.data[i] == 3.0 * gaussian_noise_at(99, i));
  CHECK(gaussian_noise_at(1, 5) != gaussian_noise_at(2, 5));
}

TEST_CASE("LN keeps the mean of mid-gray") {
  const ImagePlane gray(256, 256, 128);
  const auto out = degrade(gray, DegradePreset::ln(), ChannelSeed{3});
  const double mean =
      std::accumulate(out.samples().begin(), out.samples().end(), 0.0) / out.size();
  CHECK(std::fabs(mean - 128.0) <= 0.5);
}

TEST_CASE("blur matches a direct 2-D convolution and preserves constants") {
  const auto img = corpus::glyphs(64);
  for (auto [k, s] : {std::pair{5, 0.8}, std::pair{7, 1.2}}) {
    const auto lib = degrade(img, DegradePreset{"blur", 0.0, k, s}, ChannelSeed{});
    const auto ref = oracle_blur(img, k, s);
    int mismatches = 0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const int d = std::abs(lib.at(x, y) - ref.at(x, y));
        REQUIRE(d <= 1);
        mismatches += d;
      }
    CHECK(mismatches <= 2);
    const ImagePlane flat(30, 20, 77);
    CHECK(degrade(flat, DegradePreset{"blur", 0.0, k, s}, ChannelSeed{}) == flat);
  }
}

TEST_CASE("degrade is deterministic and seed dependent") {
  const auto img = corpus::texture(64);
  const auto a = degrade(img, DegradePreset::hn(), ChannelSeed{11});
  CHECK(a == degrade(img, DegradePreset::hn(), ChannelSeed{11}));
  CHECK(a != degrade(img, DegradePreset::hn(), ChannelSeed{12}));
  CHECK(degrade(img, DegradePreset::hn(), ChannelSeed{11}, DegradeOrder::blur_then_noise) != a);
}

TEST_CASE("severity ordering NN > LN > HN on every corpus image") {
  for (const auto& item : corpus::all()) {
    INFO(item.name);
    const double nn = psnr(item.image, degrade(item.image, DegradePreset::nn(), ChannelSeed{1}));
    const double ln = psnr(item.image, degrade(item.image, DegradePreset::ln(), ChannelSeed{1}));
    const double hn = psnr(item.image, degrade(item.image, DegradePreset::hn(), ChannelSeed{1}));
    CHECK(nn > ln);
    CHECK(ln > hn);
  }
}
