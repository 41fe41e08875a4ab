#include "msr/rdo.hpp"

#include <algorithm>
#include <cmath>

namespace msr {

std::string to_string(DistortionKind k) { return k == DistortionKind::mse ? "mse" : "one_minus_ssim"; }

DistortionKind parse_distortion_kind(const std::string& s) {
  if (s == "mse") return DistortionKind::mse;
  if (s == "one_minus_ssim") return DistortionKind::one_minus_ssim;
  throw ParameterError("unknown distortion kind '" + s + "' (expected mse or one_minus_ssim)");
}

QualityMetric parse_quality_metric(const std::string& s) {
  if (s == "psnr") return QualityMetric::psnr;
  if (s == "ssim") return QualityMetric::ssim;
  throw ParameterError("unknown quality metric '" + s + "' (expected psnr or ssim)");
}

double RatePoint::distortion(DistortionKind kind) const {
  if (kind == DistortionKind::one_minus_ssim) return 1.0 - ssim;
  if (std::isinf(psnr)) return 0.0;
  return 255.0 * 255.0 / std::pow(10.0, psnr / 10.0);
}

LagrangianCost lagrangian(double d, double lambda, double r) {
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
  if (r < 0.0) throw ParameterError("rate must be >= 0");
  return {d + lambda * r, d, lambda, r};
}

std::size_t argmin_cost(std::span<const RatePoint> points, DistortionKind kind, double lambda) {
  if (points.empty()) throw ParameterError("argmin over an empty candidate set");
  std::size_t best = 0;
  double best_j = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double j =
        lagrangian(points[i].distortion(kind), lambda, static_cast<double>(points[i].total_bits)).j;
    if (i == 0 || j < best_j) {
      best = i;
      best_j = j;
    }
  }
  return best;
}

RDCurve RDCurve::from_points(std::string method, std::vector<RatePoint> points,
                             DistortionKind d_kind, double lambda) {
  if (points.empty()) throw ParameterError("R-D curve needs at least one point");
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
  for (const auto& p : points)
    if (p.total_bits != p.base_bits + p.meta_bits)
      throw ParameterError("total_bits must equal base_bits + meta_bits");

  std::stable_sort(points.begin(), points.end(), [d_kind](const RatePoint& a, const RatePoint& b) {
    if (a.total_bits != b.total_bits) return a.total_bits < b.total_bits;
    return a.distortion(d_kind) < b.distortion(d_kind);
  });
  RDCurve c;
  c.method_ = std::move(method);
  c.d_kind_ = d_kind;
  c.lambda_ = lambda;
  for (auto& p : points)
    if (c.points_.empty() || c.points_.back().total_bits != p.total_bits) c.points_.push_back(std::move(p));
  return c;
}

std::vector<RatePoint> operational_envelope(const RDCurve& c, QualityMetric m) {
  // Points are rate-sorted; keep each point whose quality beats everything
  // cheaper. Infinite PSNR cannot be interpolated and is dropped.
  std::vector<RatePoint> out;
  for (const auto& p : c.points()) {
    const double q = p.quality(m);
    if (!std::isfinite(q)) continue;
    if (out.empty() || q > out.back().quality(m)) out.push_back(p);
  }
  return out;
}

namespace {

struct Polyline {
  std::vector<double> x;  // strictly increasing
  std::vector<double> y;

  // Flat beyond either end.
  double at(double v) const {
    if (v <= x.front()) return y.front();
    if (v >= x.back()) return y.back();
    std::size_t i = 0;
    while (i + 2 < x.size() && x[i + 1] < v) ++i;
    const double t = (v - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
  }
};

double axis_of(double rate, RateAxis axis) { return axis == RateAxis::log_rate ? std::log(rate) : rate; }
double from_axis(double v, RateAxis axis) { return axis == RateAxis::log_rate ? std::exp(v) : v; }

std::vector<RatePoint> checked_envelope(const RDCurve& c, QualityMetric m, RateAxis axis) {
  auto env = operational_envelope(c, m);
  if (env.empty()) throw NoOverlapError("curve '" + c.method() + "' has no finite quality points");
  if (axis == RateAxis::log_rate)
    for (const auto& p : env)
      if (p.total_bits == 0) throw ParameterError("log-rate interpolation needs positive rates");
  return env;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 2) throw ParameterError("comparison grid needs at least 2 samples");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
  return g;
}

Comparison summarize(const std::vector<double>& values, double lo, double hi) {
  Comparison c;
  c.lo = lo;
  c.hi = hi;
  c.samples = static_cast<int>(values.size());
  double sum = 0.0;
  c.max = values.front();
  for (double v : values) {
    sum += v;
    c.max = std::max(c.max, v);
  }
  c.mean = sum / static_cast<double>(values.size());
  return c;
}

}  // namespace

Comparison bitrate_saving_at_matched_quality(const RDCurve& ref, const RDCurve& test,
                                             QualityMetric metric, RateAxis axis, int grid) {
  auto build = [&](const RDCurve& c) {
    Polyline p;
    for (const auto& pt : checked_envelope(c, metric, axis)) {
      p.x.push_back(pt.quality(metric));
      p.y.push_back(axis_of(static_cast<double>(pt.total_bits), axis));
    }
    return p;
  };
  const Polyline r = build(ref), t = build(test);
  const double lo = std::max(r.x.front(), t.x.front());
  const double hi = std::min(r.x.back(), t.x.back());
  if (lo > hi) throw NoOverlapError("curves share no quality interval");

  std::vector<double> savings;
  for (double q : uniform_grid(lo, hi, grid)) {
    const double rr = from_axis(r.at(q), axis);
    const double rt = from_axis(t.at(q), axis);
    savings.push_back((rr - rt) / rr * 100.0);
  }
  return summarize(savings, lo, hi);
}

Comparison quality_gain_at_matched_rate(const RDCurve& ref, const RDCurve& test,
                                        QualityMetric metric, RateAxis axis, int grid) {
  auto build = [&](const RDCurve& c) {
    Polyline p;
    for (const auto& pt : checked_envelope(c, metric, axis)) {
      p.x.push_back(axis_of(static_cast<double>(pt.total_bits), axis));
      p.y.push_back(pt.quality(metric));
    }
    return p;
  };
  // Best quality at rate <= R stays flat past the last envelope point, so the
  // shared interval is bounded by the curves' full rate ranges.
  auto max_rate = [&](const RDCurve& c) { return axis_of(static_cast<double>(c.points().back().total_bits), axis); };
  const Polyline r = build(ref), t = build(test);
  const double lo = std::max(r.x.front(), t.x.front());
  const double hi = std::min(max_rate(ref), max_rate(test));
  if (lo > hi) throw NoOverlapError("curves share no rate interval");

  std::vector<double> gains;
  for (double x : uniform_grid(lo, hi, grid)) gains.push_back(t.at(x) - r.at(x));
  auto c = summarize(gains, from_axis(lo, axis), from_axis(hi, axis));
  return c;
}

std::string to_string(MetaKind k) {
  switch (k) {
    case MetaKind::none: return "none";
    case MetaKind::canny: return "canny";
    case MetaKind::grad2: return "grad2";
  }
  return "none";
}

MetaKind parse_meta_kind(const std::string& s) {
  if (s == "none") return MetaKind::none;
  if (s == "canny") return MetaKind::canny;
  if (s == "grad2") return MetaKind::grad2;
  throw ParameterError("unknown metadata kind '" + s + "' (expected none, canny or grad2)");
}

}  // namespace msr
