#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <random>
#include <string>

#include "doctest.h"
#include "msr/errors.hpp"
#include "msr/metrics.hpp"

using namespace msr;

namespace {

const std::string kData = MSR_TEST_DATA_DIR;

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

ImagePlane load_gray(const std::string& path) { return to_grayscale(load_pnm(read_file(path))); }

// Fixed 8x8 pair: a[i] = 8 + (37 i) mod 240, b[i] = a[i] + d[i] with d cycling
// through {-3, 0, 5, 1}; clamping never triggers.
ImagePlane pair8(bool second) {
  const int d[4] = {-3, 0, 5, 1};
  ImagePlane p(8, 8);
  for (int i = 0; i < 64; ++i) {
    const int a = 8 + (37 * i) % 240;
    p.samples()[i] = static_cast<std::uint8_t>(second ? a + d[i % 4] : a);
  }
  return p;
}

}  // namespace

TEST_CASE("PSNR") {
  const ImagePlane a(16, 16, 100);
  CHECK(psnr(a, a) == kPsnrInfinity);
  CHECK(mse(a, a) == 0.0);
  const ImagePlane b(16, 16, 101);
  CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-3 / 48.1308));
  CHECK(std::fabs(psnr(a, b) - 20 * std::log10(255.0)) < 1e-12);

  // 16 sites each of 9, 0, 25, 1 -> MSE = 35 / 4.
  const auto x = pair8(false), y = pair8(true);
  CHECK(mse(x, y) == 8.75);
  CHECK(psnr(x, y) == doctest::Approx(10 * std::log10(255.0 * 255.0 / 8.75)).epsilon(1e-14));
  CHECK(psnr(x, y) == psnr(y, x));
  CHECK_THROWS_AS(psnr(a, ImagePlane(16, 15)), ParameterError);
}

TEST_CASE("SSIM basics") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(0, 255);
  ImagePlane a(40, 30);
  for (auto& s : a.samples()) s = static_cast<std::uint8_t>(d(rng));
  CHECK(ssim(a, a) == 1.0);

  const double c1 = std::pow(0.01 * 255, 2);
  CHECK(ssim(ImagePlane(20, 20, 0), ImagePlane(20, 20, 255)) ==
        doctest::Approx(c1 / (255.0 * 255.0 + c1)).epsilon(1e-12));
  const double m1 = 50, m2 = 90;
  CHECK(ssim(ImagePlane(12, 11, 50), ImagePlane(12, 11, 90)) ==
        doctest::Approx((2 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1)).epsilon(1e-12));

  ImagePlane b = a;
  for (auto& s : b.samples()) s = static_cast<std::uint8_t>(255 - s);
  const double v = ssim(a, b);
  CHECK(v > -1.0);
  CHECK(v < 0.0);
  CHECK(ssim(a, b) == ssim(b, a));
  CHECK_THROWS_AS(ssim(ImagePlane(10, 20), ImagePlane(10, 20)), ParameterError);
  CHECK_THROWS_AS(ssim(ImagePlane(20, 20), ImagePlane(21, 20)), ParameterError);
}

TEST_CASE("SSIM matches the checked-in reference values") {
  const auto oracle = nlohmann::json::parse(read_file(kData + "/ssim/oracle.json"));
  int n = 0;
  for (const auto& p : oracle.at("pairs")) {
    const auto a = load_gray(kData + "/ssim/" + p.at("a").get<std::string>());
    const auto b = load_gray(kData + "/ssim/" + p.at("b").get<std::string>());
    const double expected = p.at("ssim").get<double>();
    INFO(p.at("a").get<std::string>());
    CHECK(std::fabs(ssim(a, b) - expected) <= 1e-4);
    ++n;
  }
  CHECK(n == 6);
}

TEST_CASE("evaluate bundles all three") {
  ImagePlane big(16, 16, 10), other(16, 16, 12);
  const auto r = evaluate(big, other);
  CHECK(r.mse == 4.0);
  CHECK(r.psnr == psnr(big, other));
  CHECK(r.ssim == ssim(big, other));
}

TEST_CASE("frame-difference loss") {
  auto seq = [](std::initializer_list<int> values) {
    std::vector<ImagePlane> f;
    for (int v : values) f.emplace_back(1, 1, static_cast<std::uint8_t>(v));
    return FrameSequence(std::move(f));
  };
  CHECK(frame_diff_loss(seq({0, 10}), seq({0, 4})) == 6.0);
  CHECK(frame_diff_loss(seq({3, 9, 1}), seq({3, 9, 1})) == 0.0);
  CHECK(frame_diff_loss(seq({3, 9, 1}), seq({23, 29, 21})) == 0.0);
  // Pairs: |6 - 1| = 5 and |-8 - 2| = 10, mean 7.5.
  CHECK(frame_diff_loss(seq({3, 9, 1}), seq({0, 1, 3})) == 7.5);
  CHECK_THROWS_AS(frame_diff_loss(seq({1}), seq({1})), ParameterError);
  CHECK_THROWS_AS(frame_diff_loss(seq({1, 2}), seq({1, 2, 3})), ParameterError);

  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> d(20, 200);
  std::vector<ImagePlane> fa, fb, fc;
  for (int i = 0; i < 4; ++i) {
    ImagePlane p(5, 4), q(5, 4);
    for (auto& s : p.samples()) s = static_cast<std::uint8_t>(d(rng));
    for (auto& s : q.samples()) s = static_cast<std::uint8_t>(d(rng));
    ImagePlane shifted = q;
    for (auto& s : shifted.samples()) s = static_cast<std::uint8_t>(s + 30);
    fa.push_back(p);
    fb.push_back(q);
    fc.push_back(shifted);
  }
  CHECK(frame_diff_loss(FrameSequence(fa), FrameSequence(fb)) ==
        doctest::Approx(frame_diff_loss(FrameSequence(fa), FrameSequence(fc))).epsilon(1e-15));
}
