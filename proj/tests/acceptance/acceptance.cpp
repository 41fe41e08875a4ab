// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "msr/basecodec.hpp"
#include "msr/bilevelcodec.hpp"
#include "msr/channel.hpp"
#include "msr/metagen.hpp"
#include "msr/metrics.hpp"
#include "msr/rdo.hpp"
#include "msr/theorem_check.hpp"

using namespace msr;
namespace fs = std::filesystem;

namespace {

const std::string kData = MSR_TEST_DATA_DIR;
const std::string kCorpus = MSR_CORPUS_DIR;
const std::vector<std::string> kCorpusNames{"steps", "gradient", "glyphs", "checker", "blobs", "texture"};
const std::vector<std::string> kEdgeRich{"steps", "glyphs", "checker"};

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

ImagePlane load_gray(const std::string& path) { return to_grayscale(load_pnm(read_file(path))); }

std::vector<std::pair<std::string, ImagePlane>> bundled(const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, ImagePlane>> out;
  for (const auto& n : names) out.emplace_back(n, load_gray(kCorpus + "/" + n + ".pgm"));
  return out;
}

const info::TheoremReport& theorem_report() {
  static const info::TheoremReport r = info::verify_theorem({10000, 1, 4, 4, 4});
  return r;
}

// ---------------------------------------------------------------- 1 - 4

Verdict entropy_reduction() {
  const auto& r = theorem_report();
  const bool ok = r.joints >= 10000 && r.min_entropy_slack >= -1e-12 && r.min_mutual_info >= -1e-12 &&
                  r.max_dual_gap <= 1e-10;
  return {ok, fmt("joints=%llu min H(X|Y)-H(X|Y,M)=%.3g min I=%.3g max dual gap=%.3g",
                  static_cast<unsigned long long>(r.joints), r.min_entropy_slack, r.min_mutual_info,
                  r.max_dual_gap)};
}

Verdict gated_corollary() {
  const auto& r = theorem_report();
  const bool ok = r.gated_pairs >= 10000 && r.min_gated_slack >= -1e-12;
  return {ok, fmt("pairs=%llu min slack=%.3g", static_cast<unsigned long long>(r.gated_pairs), r.min_gated_slack)};
}

Verdict nll_decomposition() {
  const auto& r = theorem_report();
  const bool ok = r.nll_pairs >= 1000 && r.max_nll_gap <= 1e-10 && r.max_exact_model_kl < 1e-12;
  return {ok, fmt("pairs=%llu max |nll-(H+KL)|=%.3g max KL(true model)=%.3g",
                  static_cast<unsigned long long>(r.nll_pairs), r.max_nll_gap, r.max_exact_model_kl)};
}

Verdict bitrate_bound() {
  const auto& r = theorem_report();
  const bool ok = r.min_bound_slack >= -1e-12 && r.tight_case_gap <= 1e-12 && r.passed();
  return {ok, fmt("min H(M)-I=%.3g tight-case gap=%.3g failures=%zu", r.min_bound_slack, r.tight_case_gap,
                  r.failures.size())};
}

// ---------------------------------------------------------------- 5

Verdict bilevel_lossless() {
  std::uint64_t planes = 0, mismatches = 0;
  for (int h = 1; h <= 4; ++h)
    for (int w = 1; w <= 4; ++w) {
      const int n = w * h;
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        std::vector<std::uint8_t> s(n);
        for (int i = 0; i < n; ++i) s[i] = (bits >> i) & 1u;
        const MetadataPlane m(w, h, 1, s);
        mismatches += meta_decode(parse_meta_container(serialize(meta_encode(m)))) != m;
        ++planes;
      }
    }

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 128);
  const double densities[4] = {0.01, 0.05, 0.20, 0.50};
  for (int i = 0; i < 1000; ++i) {
    const int w = dim(rng), h = dim(rng);
    std::bernoulli_distribution on(densities[i % 4]);
    std::vector<std::uint8_t> s(static_cast<std::size_t>(w) * h);
    for (auto& v : s) v = on(rng);
    const MetadataPlane m(w, h, 1, s);
    mismatches += meta_decode(meta_encode(m)) != m;
    ++planes;
  }

  int sparse = 0, compressed = 0;
  double worst = 1e300;
  for (const auto& [name, img] : bundled(kCorpusNames)) {
    for (const auto& m : sweep_sparsity(img, CannyParams{}, 5).maps) {
      if (m.count_nonzero() == 0 || m.density() > 0.05) continue;
      const double raw = 8.0 * static_cast<double>((m.size() + 7) / 8);
      const double ratio = raw / static_cast<double>(meta_rate(meta_encode(m)));
      worst = std::min(worst, ratio);
      ++sparse;
      compressed += ratio >= 4.0;
    }
  }
  const bool ok = mismatches == 0 && sparse > 0 && compressed == sparse;
  return {ok, fmt("planes=%llu mismatches=%llu sparse maps=%d worst ratio=%.2fx",
                  static_cast<unsigned long long>(planes), static_cast<unsigned long long>(mismatches), sparse,
                  worst)};
}

// ---------------------------------------------------------------- 6

Verdict base_codec() {
  constexpr std::uint16_t annex_k[64] = {
      16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
      14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
      18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
  const auto t = quant_table(QualityFactor(50));
  const bool table_ok = std::equal(t.begin(), t.end(), std::begin(annex_k));

  // Checked on the 5-step operating grid; unit steps are reported alongside.
  int violations = 0, unit_step = 0;
  for (const auto& [name, img] : bundled(kCorpusNames)) {
    std::vector<std::uint64_t> rate(101);
    for (int q = 1; q <= 100; ++q) rate[q] = rate_of(base_encode(img, QualityFactor(q)));
    for (int q = 10; q <= 100; q += 5) violations += rate[q] < rate[q - 5];
    for (int q = 2; q <= 100; ++q) unit_step += rate[q] < rate[q - 1];
  }
  const auto gradient = load_gray(kCorpus + "/gradient.pgm");
  const double p100 = psnr(gradient, base_decode(base_encode(gradient, QualityFactor(100))));
  const bool ok = table_ok && violations == 0 && p100 >= 40.0;
  return {ok, fmt("q50 table %s, rate drops with q on grid 5..100: %d, on unit steps: %d, gradient q100 PSNR=%.2f dB",
                  table_ok ? "matches" : "differs", violations, unit_step, p100)};
}

// ---------------------------------------------------------------- 7

Verdict metrics_oracles() {
  const double p = psnr(ImagePlane(64, 64, 100), ImagePlane(64, 64, 101));
  bool identical = true;
  for (const auto& [name, img] : bundled(kCorpusNames)) identical = identical && ssim(img, img) == 1.0;

  const auto oracle = nlohmann::json::parse(read_file(kData + "/ssim/oracle.json"));
  double worst = 0.0;
  int pairs = 0;
  for (const auto& e : oracle.at("pairs")) {
    const auto a = load_gray(kData + "/ssim/" + e.at("a").get<std::string>());
    const auto b = load_gray(kData + "/ssim/" + e.at("b").get<std::string>());
    worst = std::max(worst, std::fabs(ssim(a, b) - e.at("ssim").get<double>()));
    ++pairs;
  }
  auto seq = [](int a, int b) {
    return FrameSequence({ImagePlane(1, 1, static_cast<std::uint8_t>(a)), ImagePlane(1, 1, static_cast<std::uint8_t>(b))});
  };
  const double fd = frame_diff_loss(seq(0, 10), seq(0, 4));
  const bool ok = std::fabs(p - 48.1308) <= 1e-3 && identical && pairs > 0 && worst <= 1e-4 && fd == 6.0;
  return {ok, fmt("PSNR=%.4f dB, SSIM(x,x)==1 %s, oracle pairs=%d max |dSSIM|=%.2g, frame diff=%.1f", p,
                  identical ? "yes" : "no", pairs, worst, fd)};
}

// ---------------------------------------------------------------- 8

Verdict degradation_presets() {
  double worst_rel = 0.0;
  const ImagePlane gray(256, 256, 128);
  for (double sigma : {10.0, 20.0}) {
    const auto noisy = degrade(gray, DegradePreset{"noise", sigma, 1, 0.0}, ChannelSeed{17});
    double sum = 0.0, ss = 0.0;
    for (auto v : noisy.samples()) sum += v - 128.0;
    const double mean = sum / noisy.size();
    for (auto v : noisy.samples()) ss += (v - 128.0 - mean) * (v - 128.0 - mean);
    worst_rel = std::max(worst_rel, std::fabs(std::sqrt(ss / noisy.size()) - sigma) / sigma);
  }
  bool nn_identity = true, ordered = true;
  for (const auto& [name, img] : bundled(kCorpusNames)) {
    const auto nn = degrade(img, DegradePreset::nn(), ChannelSeed{1});
    nn_identity = nn_identity && nn == img;
    const double pn = psnr(img, nn);
    const double pl = psnr(img, degrade(img, DegradePreset::ln(), ChannelSeed{1}));
    const double ph = psnr(img, degrade(img, DegradePreset::hn(), ChannelSeed{1}));
    ordered = ordered && pn > pl && pl > ph;
  }
  const bool ok = worst_rel <= 0.05 && nn_identity && ordered;
  return {ok, fmt("worst noise std error=%.2f%%, NN identity %s, NN>LN>HN %s", 100 * worst_rel,
                  nn_identity ? "yes" : "no", ordered ? "on every image" : "violated")};
}

// ---------------------------------------------------------------- 9

RatePoint pt(std::uint64_t bits, double psnr) {
  RatePoint r;
  r.base_bits = r.total_bits = bits;
  r.psnr = psnr;
  r.ssim = 0.5;
  r.regime = "NN";
  r.reconstructor = "bicubic";
  return r;
}

RDCurve curve(std::vector<RatePoint> pts) {
  return RDCurve::from_points("c", std::move(pts), DistortionKind::mse, 0.0);
}

Verdict rdo_comparisons() {
  const auto ref = curve({pt(100, 30), pt(200, 34), pt(400, 36)});
  const auto test = curve({pt(80, 31), pt(150, 35), pt(300, 37)});
  const auto self_s = bitrate_saving_at_matched_quality(ref, ref, QualityMetric::psnr);
  const auto self_g = quality_gain_at_matched_rate(ref, ref, QualityMetric::psnr);
  const bool self_ok = self_s.mean == 0.0 && self_s.max == 0.0 && self_g.mean == 0.0 && self_g.max == 0.0;

  const auto full = curve({pt(1000, 30.5), pt(2600, 33.25), pt(7000, 35.0), pt(9000, 35.5)});
  const auto half = curve({pt(500, 30.5), pt(1300, 33.25), pt(3500, 35.0), pt(4500, 35.5)});
  const auto hs = bitrate_saving_at_matched_quality(full, half, QualityMetric::psnr);
  const bool half_ok = hs.mean == 50.0 && hs.max == 50.0;

  const auto lo = curve({pt(1000, 32.5), pt(2000, 36.75), pt(5000, 40.125), pt(8000, 41.0)});
  const auto hi = curve({pt(1000, 33.5), pt(2000, 37.75), pt(5000, 41.125), pt(8000, 42.0)});
  const auto dg = quality_gain_at_matched_rate(lo, hi, QualityMetric::psnr);
  const bool db_ok = dg.mean == 1.0 && dg.max == 1.0;

  // Savings at quality 31, 33.5, 36: 36, 34, 43.75 percent.
  // Gains at rate 100, 200, 300: 15/7, 5/3, 2 dB.
  const auto s3 = bitrate_saving_at_matched_quality(ref, test, QualityMetric::psnr, RateAxis::linear, 3);
  const auto g3 = quality_gain_at_matched_rate(ref, test, QualityMetric::psnr, RateAxis::linear, 3);
  const double err = std::max({std::fabs(s3.mean - 113.75 / 3.0), std::fabs(s3.max - 43.75),
                               std::fabs(g3.mean - 122.0 / 63.0), std::fabs(g3.max - 15.0 / 7.0)});
  const bool ok = self_ok && half_ok && db_ok && err <= 1e-9;
  return {ok, fmt("self 0 %s, half-rate saving=%.12g%%, +1 dB gain=%.12g dB, 3-point max error=%.2g",
                  self_ok ? "yes" : "no", hs.mean, dg.mean, err)};
}

// ---------------------------------------------------------------- 10

Comparison guided_gain(const std::vector<ImagePlane>& images, const DegradePreset& regime) {
  CurveConfig cfg;
  cfg.regime = regime;
  cfg.reconstructor = "edgeguided";
  cfg.quality_factors = {10, 20, 30, 40, 50, 60, 70, 80, 90, 95};
  cfg.scale = 4;
  cfg.workers = 4;
  cfg.method = "without";
  const auto base = build_curve(images, cfg);
  cfg.method = "with";
  cfg.meta.kind = MetaKind::canny;
  cfg.meta.levels = 5;
  cfg.meta.pools = {1, 2, 4};
  const auto guided = build_curve(images, cfg);
  return quality_gain_at_matched_rate(base, guided, QualityMetric::ssim);
}

Verdict end_to_end_trend() {
  std::vector<ImagePlane> images;
  for (auto& [name, img] : bundled(kEdgeRich)) images.push_back(std::move(img));
  const auto t0 = std::chrono::steady_clock::now();
  const auto hn = guided_gain(images, DegradePreset::hn());
  const auto nn = guided_gain(images, DegradePreset::nn());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = hn.max > 0.0 && hn.max > nn.max && secs < 300.0;
  return {ok, fmt("max SSIM gain at matched rate: HN=%.4f NN=%.4f (means %.4f / %.4f), sweep %.1f s", hn.max,
                  nn.max, hn.mean, nn.mean, secs)};
}

// ---------------------------------------------------------------- 11

int cli_run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

std::string slurp(const fs::path& p) {
  const auto b = read_file(p.string());
  return std::string(b.begin(), b.end());
}

Verdict determinism() {
  const auto dir = fs::temp_directory_path() / ("msr_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const auto out_dir = (dir / "sweep").string();
  const std::vector<std::string> sweep{
      "sweep", "--corpus", kCorpus, "--out-dir", out_dir, "--regimes", "NN,HN", "--qs", "30,70",
      "--meta", "canny", "--meta-levels", "2", "--pools", "1,2", "--lambda", "0.01", "--seed", "11",
      "--per-image", "--workers", "1"};
  std::string detail;
  bool ok = cli_run(sweep) == 0;
  const auto csv = ok ? slurp(out_dir + "/curves.csv") : std::string();
  fs::rename(out_dir + "/curves.csv", out_dir + "/first.csv");

  std::string report;
  const int code = ok ? cli_run({"replay", out_dir + "/manifest.json", "--check", "--workers", "4"}, &report) : -1;
  const bool replay_ok = code == 0;
  const bool bytes_ok = ok && fs::exists(out_dir + "/curves.csv") && slurp(out_dir + "/curves.csv") == csv;
  ok = ok && replay_ok && bytes_ok && !csv.empty();
  detail = fmt("sweep csv %zu bytes, replay with 4 workers exit=%d, byte-identical %s", csv.size(), code,
               bytes_ok ? "yes" : "no");
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"entropy reduction under side information", entropy_reduction, 30},
      {"gating never increases entropy", gated_corollary, 30},
      {"log-loss decomposition", nll_decomposition, 30},
      {"information bounded by metadata entropy", bitrate_bound, 30},
      {"bi-level codec losslessness and compression", bilevel_lossless, 0},
      {"base codec table, rate monotonicity, q100 fidelity", base_codec, 0},
      {"metric oracles", metrics_oracles, 0},
      {"degradation presets", degradation_presets, 0},
      {"rate-distortion comparisons", rdo_comparisons, 0},
      {"end-to-end HN gain exceeds NN gain", end_to_end_trend, 300},
      {"sweep replay is byte-identical across worker counts", determinism, 0},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      v.pass = false;
      v.detail += fmt(" [over %.0f s budget]", c.budget_s);
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", i + 1, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
