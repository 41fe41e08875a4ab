#include "msr/receiver.hpp"

#include <cmath>

namespace msr {

void check_scale(int scale) {
  if (scale != 1 && scale != 2 && scale != 4) throw ParameterError("scale must be 1, 2 or 4");
}

MetadataPlane dilate(const MetadataPlane& m) {
  MetadataPlane out(m.width(), m.height(), 1);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height()) out.set(nx, ny, 1);
        }
    }
  return out;
}

double gate_score(const MetadataPlane& m, const MetadataPlane& local_support) {
  std::size_t set = 0, agree = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.sites()[i]) continue;
    ++set;
    if (local_support.sites()[i]) ++agree;
  }
  return set == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(set);
}

GateDecision gate(const ImagePlane& lq, const MetadataPlane& m, int scale, double tau) {
  if (scale < 1) throw ParameterError("scale must be >= 1");
  if (m.width() != lq.width() * scale || m.height() != lq.height() * scale)
    throw ParameterError("metadata grid must be scale x observation dimensions");
  const MetadataPlane edges = binarize(m, 2);
  const ImagePlane up = resample(lq, m.width(), m.height(), ResampleKernel::bicubic);
  const MetadataPlane local = dilate(canny(up, kGateCanny));
  GateDecision d;
  d.tau = tau;
  d.score = gate_score(edges, local);
  d.v = d.score >= tau;
  return d;
}

ImagePlane BicubicReconstructor::reconstruct(const ImagePlane& lq, const MetadataPlane*,
                                             int scale) const {
  return resample(lq, lq.width() * scale, lq.height() * scale, ResampleKernel::bicubic);
}

ImagePlane EdgeGuidedReconstructor::reconstruct(const ImagePlane& lq, const MetadataPlane* m,
                                                int scale) const {
  const int w = lq.width() * scale, h = lq.height() * scale;
  const FloatPlane up = resample_float(to_float(lq), w, h, ResampleKernel::bicubic);
  const FloatPlane denoised = convolve_separable(up, gaussian_kernel(opt_.denoise_sigma, 3));
  if (m == nullptr) return to_plane(denoised);

  if (m->width() != w || m->height() != h)
    throw ParameterError("metadata grid does not match reconstruction size");
  const MetadataPlane near = dilate(binarize(*m, 2));
  if (near.count_nonzero() == 0) return to_plane(denoised);

  const double sigma = std::max(0.5, opt_.log_sigma_per_scale * scale);
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const FloatPlane smooth = convolve_separable(up, gaussian_kernel(sigma, 2 * radius + 1));

  FloatPlane out = denoised;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!near.at(x, y)) continue;
      const double lap = smooth.clamped(x + 1, y) + smooth.clamped(x - 1, y) +
                         smooth.clamped(x, y + 1) + smooth.clamped(x, y - 1) - 4.0 * smooth.at(x, y);
      out.at(x, y) = up.at(x, y) - opt_.alpha * sigma * sigma * lap;
    }
  return to_plane(out);
}

ReconstructorRegistry ReconstructorRegistry::with_defaults(EdgeGuidedOptions edge) {
  ReconstructorRegistry r;
  r.add(std::make_shared<BicubicReconstructor>());
  r.add(std::make_shared<EdgeGuidedReconstructor>(edge));
  return r;
}

void ReconstructorRegistry::add(std::shared_ptr<const Reconstructor> r) {
  const auto id = r->name();
  items_[id] = std::move(r);
}

const Reconstructor& ReconstructorRegistry::get(const std::string& id) const {
  auto it = items_.find(id);
  if (it == items_.end()) throw RegistryError("unknown reconstructor '" + id + "'");
  return *it->second;
}

std::vector<std::string> ReconstructorRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : items_) out.push_back(k);
  return out;
}

ImagePlane reconstruct(const ReconstructorRegistry& registry, const std::string& id,
                       const ImagePlane& lq, const MetadataPlane* m_tilde, int scale) {
  check_scale(scale);
  return registry.get(id).reconstruct(lq, m_tilde, scale);
}

}  // namespace msr
