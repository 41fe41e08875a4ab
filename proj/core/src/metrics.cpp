#include "msr/metrics.hpp"

#include <cmath>
#include <cstdlib>

namespace msr {

namespace {

void require_same_size(const ImagePlane& a, const ImagePlane& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw ParameterError("metric inputs differ in dimensions");
}

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

// Separable weighted window sum over valid positions only.
FloatPlane window_filter(const FloatPlane& in, std::span<const double> w) {
  const int ow = in.width - kWin + 1, oh = in.height - kWin + 1;
  FloatPlane tmp(ow, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += w[k] * in.at(x + k, y);
      tmp.at(x, y) = acc;
    }
  FloatPlane out(ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += w[k] * tmp.at(x, y + k);
      out.at(x, y) = acc;
    }
  return out;
}

FloatPlane product(const FloatPlane& a, const FloatPlane& b) {
  FloatPlane out(a.width, a.height);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

}  // namespace

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_size(a, b);
  std::uint64_t acc = 0;
  const auto sa = a.samples(), sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = static_cast<int>(sa[i]) - static_cast<int>(sb[i]);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(acc) / static_cast<double>(sa.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_size(a, b);
  if (a.width() < kWin || a.height() < kWin)
    throw ParameterError("SSIM needs images of at least 11x11");
  const auto w = gaussian_kernel(kWinSigma, kWin);
  const FloatPlane fa = to_float(a), fb = to_float(b);
  const FloatPlane mu_a = window_filter(fa, w);
  const FloatPlane mu_b = window_filter(fb, w);
  const FloatPlane e_aa = window_filter(product(fa, fa), w);
  const FloatPlane e_bb = window_filter(product(fb, fb), w);
  const FloatPlane e_ab = window_filter(product(fa, fb), w);

  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.data.size(); ++i) {
    const double ma = mu_a.data[i], mb = mu_b.data[i];
    const double va = e_aa.data[i] - ma * ma;
    const double vb = e_bb.data[i] - mb * mb;
    const double cov = e_ab.data[i] - ma * mb;
    const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
    const double den = (ma * ma + mb * mb + kC1) * (va + vb + kC2);
    sum += num / den;
  }
  return sum / static_cast<double>(mu_a.data.size());
}

MetricReport evaluate(const ImagePlane& reference, const ImagePlane& test) {
  MetricReport r;
  r.mse = mse(reference, test);
  r.psnr = r.mse == 0.0 ? kPsnrInfinity : 10.0 * std::log10(255.0 * 255.0 / r.mse);
  r.ssim = ssim(reference, test);
  return r;
}

double frame_diff_loss(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() < 2) throw ParameterError("frame difference loss needs at least 2 frames");
  if (a.size() != b.size()) throw ParameterError("frame sequences differ in length");
  if (a.width() != b.width() || a.height() != b.height())
    throw ParameterError("frame sequences differ in dimensions");

  const std::size_t pixels = static_cast<std::size_t>(a.width()) * a.height();
  double total = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto a0 = a[i - 1].samples(), a1 = a[i].samples();
    const auto b0 = b[i - 1].samples(), b1 = b[i].samples();
    long long acc = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
      const int da = static_cast<int>(a1[p]) - a0[p];
      const int db = static_cast<int>(b1[p]) - b0[p];
      acc += std::abs(da - db);
    }
    total += static_cast<double>(acc) / static_cast<double>(pixels);
  }
  return total / static_cast<double>(a.size() - 1);
}

}  // namespace msr
