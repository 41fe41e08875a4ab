#include "msr/metagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msr {

MetadataPlane::MetadataPlane(int width, int height, int depth)
    : width_(width), height_(height), depth_(depth) {
  if (width < 1 || height < 1) throw ParameterError("metadata dimensions must be >= 1");
  if (depth != 1 && depth != 2) throw ParameterError("metadata depth must be 1 or 2");
  sites_.assign(static_cast<std::size_t>(width) * height, 0);
}

MetadataPlane::MetadataPlane(int width, int height, int depth, std::vector<std::uint8_t> sites)
    : MetadataPlane(width, height, depth) {
  if (sites.size() != sites_.size()) throw ParameterError("metadata site count mismatch");
  for (auto v : sites)
    if (v >= (1 << depth)) throw ParameterError("metadata site value exceeds depth");
  sites_ = std::move(sites);
}

void MetadataPlane::set(int x, int y, std::uint8_t v) {
  if (v >= (1 << depth_)) throw ParameterError("metadata site value exceeds depth");
  sites_[index(x, y)] = v;
}

std::size_t MetadataPlane::count_nonzero() const noexcept {
  return static_cast<std::size_t>(std::count_if(sites_.begin(), sites_.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

double MetadataPlane::density() const noexcept {
  return sites_.empty() ? 0.0 : static_cast<double>(count_nonzero()) / sites_.size();
}

void CannyParams::validate() const {
  if (!(gauss_sigma > 0.0)) throw ParameterError("canny sigma must be > 0");
  if (!(low_thresh > 0.0)) throw ParameterError("canny low threshold must be > 0");
  if (!(low_thresh <= high_thresh)) throw ParameterError("canny low threshold must be <= high");
}

GradientField gradient_field(const ImagePlane& plane, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("smoothing sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto kernel = gaussian_kernel(sigma, 2 * radius + 1);
  const FloatPlane s = convolve_separable(to_float(plane), kernel);

  const int w = plane.width(), h = plane.height();
  GradientField g{FloatPlane(w, h), FloatPlane(w, h), FloatPlane(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = (s.clamped(x + 1, y - 1) + 2 * s.clamped(x + 1, y) + s.clamped(x + 1, y + 1)) -
                        (s.clamped(x - 1, y - 1) + 2 * s.clamped(x - 1, y) + s.clamped(x - 1, y + 1));
      const double gy = (s.clamped(x - 1, y + 1) + 2 * s.clamped(x, y + 1) + s.clamped(x + 1, y + 1)) -
                        (s.clamped(x - 1, y - 1) + 2 * s.clamped(x, y - 1) + s.clamped(x + 1, y - 1));
      g.gx.at(x, y) = gx;
      g.gy.at(x, y) = gy;
      g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  return g;
}

MetadataPlane non_max_suppression(const GradientField& g) {
  const int w = g.magnitude.width, h = g.magnitude.height;
  MetadataPlane out(w, h, 1);
  // tan(22.5 deg) and tan(67.5 deg) split the four direction sectors.
  const double t1 = std::tan(std::numbers::pi / 8.0);
  const double t2 = std::tan(3.0 * std::numbers::pi / 8.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double m = g.magnitude.at(x, y);
      if (m <= 0.0) continue;
      const double gx = g.gx.at(x, y), gy = g.gy.at(x, y);
      const double ax = std::abs(gx), ay = std::abs(gy);
      int dx, dy;
      if (ay <= t1 * ax) {
        dx = 1, dy = 0;
      } else if (ay >= t2 * ax) {
        dx = 0, dy = 1;
      } else if ((gx > 0) == (gy > 0)) {
        dx = 1, dy = 1;
      } else {
        dx = 1, dy = -1;
      }
      // Strict on the backward neighbour, non-strict forward: a plateau of
      // two equal maxima yields a single-pixel ridge.
      const double back = g.magnitude.clamped(x - dx, y - dy);
      const double fwd = g.magnitude.clamped(x + dx, y + dy);
      const bool back_in = x - dx >= 0 && x - dx < w && y - dy >= 0 && y - dy < h;
      const bool fwd_in = x + dx >= 0 && x + dx < w && y + dy >= 0 && y + dy < h;
      if ((!back_in || m > back) && (!fwd_in || m >= fwd)) out.set(x, y, 1);
    }
  return out;
}

MetadataPlane hysteresis(const GradientField& g, const MetadataPlane& nms, double low,
                         double high) {
  const int w = nms.width(), h = nms.height();
  MetadataPlane out(w, h, 1);
  std::vector<std::pair<int, int>> stack;
  auto weak = [&](int x, int y) { return nms.at(x, y) && g.magnitude.at(x, y) >= low; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (out.at(x, y) || !nms.at(x, y) || g.magnitude.at(x, y) < high) continue;
      out.set(x, y, 1);
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int ny = cy - 1; ny <= cy + 1; ++ny)
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || out.at(nx, ny)) continue;
            if (!weak(nx, ny)) continue;
            out.set(nx, ny, 1);
            stack.emplace_back(nx, ny);
          }
      }
    }
  return out;
}

MetadataPlane canny(const ImagePlane& plane, const CannyParams& params) {
  params.validate();
  const auto g = gradient_field(plane, params.gauss_sigma);
  return hysteresis(g, non_max_suppression(g), params.low_thresh, params.high_thresh);
}

SparsitySweep sweep_sparsity(const ImagePlane& plane, const CannyParams& base, int levels,
                             double ratio) {
  base.validate();
  if (levels < 2) throw ParameterError("sparsity sweep needs at least 2 levels");
  if (!(ratio > 1.0)) throw ParameterError("sparsity ratio must be > 1");
  const auto g = gradient_field(plane, base.gauss_sigma);
  const auto nms = non_max_suppression(g);

  SparsitySweep sweep;
  double scale = 1.0;
  for (int i = 0; i < levels; ++i, scale *= ratio) {
    CannyParams p = base;
    p.low_thresh *= scale;
    p.high_thresh *= scale;
    sweep.maps.push_back(hysteresis(g, nms, p.low_thresh, p.high_thresh));
    sweep.params.push_back(p);
  }
  sweep.all_empty = std::all_of(sweep.maps.begin(), sweep.maps.end(),
                                [](const MetadataPlane& m) { return m.count_nonzero() == 0; });
  return sweep;
}

MetadataPlane gradient_2bit(const ImagePlane& plane, double sigma) {
  const auto g = gradient_field(plane, sigma);
  MetadataPlane out(plane.width(), plane.height(), 2);
  for (int y = 0; y < plane.height(); ++y)
    for (int x = 0; x < plane.width(); ++x) {
      const double m = g.magnitude.at(x, y);
      std::uint8_t level = 0;
      for (double t : kGrad2Thresholds)
        if (m >= t) ++level;
      out.set(x, y, level);
    }
  return out;
}

MetadataPlane downsample_metadata(const MetadataPlane& m, int factor) {
  if (factor < 1) throw ParameterError("pooling factor must be >= 1");
  if (factor == 1) return m;
  const int w = (m.width() + factor - 1) / factor;
  const int h = (m.height() + factor - 1) / factor;
  MetadataPlane out(w, h, m.depth());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      const auto v = m.at(x, y);
      if (v > out.at(x / factor, y / factor)) out.set(x / factor, y / factor, v);
    }
  return out;
}

MetadataPlane expand_metadata(const MetadataPlane& m, int width, int height) {
  if (m.width() == width && m.height() == height) return m;
  int factor = 0;
  for (int f = 2; f <= std::max(width, height); ++f)
    if ((width + f - 1) / f == m.width() && (height + f - 1) / f == m.height()) {
      factor = f;
      break;
    }
  if (factor == 0) throw ParameterError("metadata grid is not a pooled version of the target grid");
  MetadataPlane out(width, height, m.depth());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.set(x, y, m.at(x / factor, y / factor));
  return out;
}

MetadataPlane binarize(const MetadataPlane& m, int min_level) {
  if (m.depth() == 1) return m;
  MetadataPlane out(m.width(), m.height(), 1);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(x, y, m.at(x, y) >= min_level ? 1 : 0);
  return out;
}

ImagePlane metadata_to_plane(const MetadataPlane& m) {
  const int step = m.depth() == 1 ? 255 : 85;
  std::vector<std::uint8_t> s(m.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(m.sites()[i] * step);
  return ImagePlane(m.width(), m.height(), std::move(s));
}

}  // namespace msr
