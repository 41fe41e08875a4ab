#include "msr/pixelcore.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace msr {

ImagePlane::ImagePlane(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw ParameterError("image dimensions must be >= 1");
  samples_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) throw ParameterError("image dimensions must be >= 1");
  if (samples_.size() != static_cast<std::size_t>(width) * height)
    throw ParameterError("sample count does not match width*height");
}

std::uint8_t ImagePlane::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return samples_[index(x, y)];
}

ImageFrame::ImageFrame(ImagePlane gray) { planes_.push_back(std::move(gray)); }

ImageFrame::ImageFrame(std::vector<ImagePlane> planes) : planes_(std::move(planes)) {
  if (planes_.size() != 1 && planes_.size() != 3)
    throw ParameterError("frame must have 1 or 3 planes");
  for (const auto& p : planes_) {
    if (p.width() != planes_[0].width() || p.height() != planes_[0].height())
      throw ParameterError("frame planes differ in dimensions");
  }
}

FrameSequence::FrameSequence(std::vector<ImagePlane> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw ParameterError("frame sequence must be non-empty");
  for (const auto& f : frames_) {
    if (f.width() != frames_[0].width() || f.height() != frames_[0].height())
      throw ParameterError("frame sequence dimensions differ");
  }
}

double FloatPlane::clamped(int x, int y) const {
  x = std::clamp(x, 0, width - 1);
  y = std::clamp(y, 0, height - 1);
  return data[static_cast<std::size_t>(y) * width + x];
}

FloatPlane to_float(const ImagePlane& plane) {
  FloatPlane out(plane.width(), plane.height());
  auto s = plane.samples();
  std::copy(s.begin(), s.end(), out.data.begin());
  return out;
}

ImagePlane to_plane(const FloatPlane& plane) {
  std::vector<std::uint8_t> s(plane.data.size());
  std::transform(plane.data.begin(), plane.data.end(), s.begin(), to_u8);
  return ImagePlane(plane.width, plane.height, std::move(s));
}

// ---------------------------------------------------------------- PNM

namespace {

class PnmHeaderParser {
 public:
  explicit PnmHeaderParser(std::span<const std::uint8_t> b) : b_(b) {}

  void skip_space_and_comments(const std::string& field) {
    bool any = false;
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
        any = true;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
        any = true;
      } else {
        break;
      }
    }
    if (!any) throw FormatError(field, "expected whitespace separator");
  }

  long number(const std::string& field) {
    if (pos_ >= b_.size()) throw FormatError(field, "truncated header");
    if (!std::isdigit(b_[pos_])) throw FormatError(field, "expected decimal integer");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000'000L) throw FormatError(field, "value too large");
      ++pos_;
    }
    return v;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> b_;
};

}  // namespace

ImageFrame load_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw FormatError("magic", "expected P5 or P6");
  const int channels = bytes[1] == '5' ? 1 : 3;

  PnmHeaderParser p(bytes);
  p.pos_ = 2;
  p.skip_space_and_comments("width");
  long w = p.number("width");
  p.skip_space_and_comments("height");
  long h = p.number("height");
  p.skip_space_and_comments("maxval");
  long maxval = p.number("maxval");
  if (w < 1) throw FormatError("width", "must be >= 1");
  if (h < 1) throw FormatError("height", "must be >= 1");
  if (maxval != 255) throw FormatError("maxval", "only 255 is supported, got " + std::to_string(maxval));
  if (p.pos_ >= bytes.size() || !std::isspace(bytes[p.pos_]))
    throw FormatError("maxval", "missing single whitespace before payload");
  ++p.pos_;

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - p.pos_ < n * channels) throw FormatError("payload", "truncated raster data");

  std::vector<ImagePlane> planes;
  for (int c = 0; c < channels; ++c) {
    std::vector<std::uint8_t> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = bytes[p.pos_ + i * channels + c];
    planes.emplace_back(static_cast<int>(w), static_cast<int>(h), std::move(s));
  }
  return ImageFrame(std::move(planes));
}

Bytes save_pnm(const ImageFrame& frame) {
  const auto channels = frame.plane_count();
  std::string header = std::string(channels == 1 ? "P5" : "P6") + "\n" +
                       std::to_string(frame.width()) + " " + std::to_string(frame.height()) +
                       "\n255\n";
  Bytes out(header.begin(), header.end());
  const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  out.reserve(out.size() + n * channels);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < channels; ++c) out.push_back(frame.plane(c).samples()[i]);
  return out;
}

ImagePlane crop(const ImagePlane& plane, int width, int height) {
  if (width < 1 || height < 1 || width > plane.width() || height > plane.height())
    throw ParameterError("crop window does not fit the plane");
  if (width == plane.width() && height == plane.height()) return plane;
  ImagePlane out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(x, y) = plane.at(x, y);
  return out;
}

ImagePlane to_grayscale(const ImageFrame& frame) {
  if (frame.is_gray()) return frame.plane(0);
  const auto r = frame.plane(0).samples();
  const auto g = frame.plane(1).samples();
  const auto b = frame.plane(2).samples();
  std::vector<std::uint8_t> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    // Integer weights in thousandths keep the half-way cases exact.
    const int sum = 299 * r[i] + 587 * g[i] + 114 * b[i];
    out[i] = static_cast<std::uint8_t>(std::min(255, (sum + 500) / 1000));
  }
  return ImagePlane(frame.width(), frame.height(), std::move(out));
}

// ---------------------------------------------------------------- resampling

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  int first;
  double w[4];
};

// Per-output-coordinate source taps along one axis.
std::vector<Taps> bicubic_taps(int src, int dst) {
  std::vector<Taps> taps(dst);
  const double ratio = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double pos = (i + 0.5) * ratio - 0.5;
    const int base = static_cast<int>(std::floor(pos));
    const double frac = pos - base;
    taps[i].first = base - 1;
    for (int k = 0; k < 4; ++k) taps[i].w[k] = catmull_rom(frac - (k - 1));
  }
  return taps;
}

int nearest_index(int i, int src, int dst) {
  // floor((i + 0.5) * src / dst) in exact integer arithmetic.
  return static_cast<int>((static_cast<long long>(2 * i + 1) * src) / (2LL * dst));
}

}  // namespace

FloatPlane resample_float(const FloatPlane& plane, int new_width, int new_height,
                          ResampleKernel kernel) {
  if (new_width < 1 || new_height < 1) throw ParameterError("resample target must be >= 1");
  FloatPlane out(new_width, new_height);
  if (kernel == ResampleKernel::nearest) {
    for (int y = 0; y < new_height; ++y) {
      const int sy = nearest_index(y, plane.height, new_height);
      for (int x = 0; x < new_width; ++x)
        out.at(x, y) = plane.at(nearest_index(x, plane.width, new_width), sy);
    }
    return out;
  }

  const auto tx = bicubic_taps(plane.width, new_width);
  const auto ty = bicubic_taps(plane.height, new_height);
  FloatPlane horiz(new_width, plane.height);
  for (int y = 0; y < plane.height; ++y) {
    for (int x = 0; x < new_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += tx[x].w[k] * plane.clamped(tx[x].first + k, y);
      horiz.at(x, y) = acc;
    }
  }
  for (int y = 0; y < new_height; ++y) {
    for (int x = 0; x < new_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += ty[y].w[k] * horiz.clamped(x, ty[y].first + k);
      out.at(x, y) = acc;
    }
  }
  return out;
}

ImagePlane resample(const ImagePlane& plane, int new_width, int new_height,
                    ResampleKernel kernel) {
  return to_plane(resample_float(to_float(plane), new_width, new_height, kernel));
}

std::vector<double> gaussian_kernel(double sigma, int size) {
  if (size < 1 || size % 2 == 0) throw ParameterError("kernel size must be odd and >= 1");
  if (!(sigma > 0.0)) throw ParameterError("kernel sigma must be > 0");
  std::vector<double> w(size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    w[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += w[i + r];
  }
  for (auto& v : w) v /= sum;
  return w;
}

FloatPlane convolve_separable(const FloatPlane& plane, std::span<const double> kernel) {
  const int r = static_cast<int>(kernel.size()) / 2;
  FloatPlane tmp(plane.width, plane.height);
  for (int y = 0; y < plane.height; ++y)
    for (int x = 0; x < plane.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * plane.clamped(x + k, y);
      tmp.at(x, y) = acc;
    }
  FloatPlane out(plane.width, plane.height);
  for (int y = 0; y < plane.height; ++y)
    for (int x = 0; x < plane.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * tmp.clamped(x, y + k);
      out.at(x, y) = acc;
    }
  return out;
}

}  // namespace msr
