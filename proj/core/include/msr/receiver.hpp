#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "msr/metagen.hpp"
#include "msr/pixelcore.hpp"

namespace msr {

// v(Y, M): accept transmitted edges only when they agree with edges the
// receiver can recover from its own observation.
struct GateDecision {
  bool v = true;
  double score = 1.0;
  double tau = 0.0;
};

// Every genuine map of the bundled corpus scores >= 0.43 under NN/LN/HN.
inline constexpr double kDefaultTau = 0.4;

// Loose detector the receiver runs on the upsampled observation.
inline const CannyParams kGateCanny{1.0, 10.0, 25.0};

// score = |m AND dilate(local edges)| / |m| (1 when m is empty);
// v = score >= tau. Depth-2 maps are thresholded at level >= 2 first.
GateDecision gate(const ImagePlane& lq, const MetadataPlane& m, int scale, double tau);

// The same score against an already computed local edge support.
double gate_score(const MetadataPlane& m, const MetadataPlane& local_support);

// 8-neighbourhood dilation by one site.
MetadataPlane dilate(const MetadataPlane& m);

// Deterministic mapping (lq, optional metadata, scale) -> HR plane of
// dimensions scale * lq. Implementations must be pure and accept nullptr
// metadata (the fallback symbol).
class Reconstructor {
 public:
  virtual ~Reconstructor() = default;
  virtual std::string name() const = 0;
  virtual bool uses_metadata() const = 0;
  virtual ImagePlane reconstruct(const ImagePlane& lq, const MetadataPlane* m, int scale) const = 0;
};

class BicubicReconstructor final : public Reconstructor {
 public:
  std::string name() const override { return "bicubic"; }
  bool uses_metadata() const override { return false; }
  ImagePlane reconstruct(const ImagePlane& lq, const MetadataPlane* m, int scale) const override;
};

struct EdgeGuidedOptions {
  double alpha = 0.6;          // sharpening gain
  double log_sigma_per_scale = 0.5;  // LoG sigma = this * scale (min 0.5)
  double denoise_sigma = 0.5;  // 3x3 Gaussian light denoiser
};

// Bicubic upsample, then:
//  - near metadata edges (distance <= 1): add alpha * sigma^2 * (-LoG) sharpening
//    and leave the pixel un-denoised;
//  - elsewhere: 3x3 Gaussian light denoiser.
// Without metadata every site is "elsewhere".
class EdgeGuidedReconstructor final : public Reconstructor {
 public:
  explicit EdgeGuidedReconstructor(EdgeGuidedOptions opt = {}) : opt_(opt) {}
  std::string name() const override { return "edgeguided"; }
  bool uses_metadata() const override { return true; }
  ImagePlane reconstruct(const ImagePlane& lq, const MetadataPlane* m, int scale) const override;
  const EdgeGuidedOptions& options() const noexcept { return opt_; }

 private:
  EdgeGuidedOptions opt_;
};

// Immutable id -> reconstructor map.
class ReconstructorRegistry {
 public:
  static ReconstructorRegistry with_defaults(EdgeGuidedOptions edge = {});

  void add(std::shared_ptr<const Reconstructor> r);
  const Reconstructor& get(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, std::shared_ptr<const Reconstructor>> items_;
};

void check_scale(int scale);

// Registry dispatch; scale must be 1, 2 or 4.
ImagePlane reconstruct(const ReconstructorRegistry& registry, const std::string& id,
                       const ImagePlane& lq, const MetadataPlane* m_tilde, int scale);

}  // namespace msr
