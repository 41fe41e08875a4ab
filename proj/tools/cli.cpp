#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msr/basecodec.hpp"
#include "msr/bilevelcodec.hpp"
#include "msr/channel.hpp"
#include "msr/corpus.hpp"
#include "msr/metagen.hpp"
#include "msr/metrics.hpp"
#include "msr/rdo.hpp"
#include "msr/receiver.hpp"
#include "msr/theorem_check.hpp"

#ifndef MSR_VERSION
#define MSR_VERSION "0.0.0"
#endif

namespace msr::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

class ReplayMismatch : public Error {
 public:
  using Error::Error;
};

class TheoremFailure : public Error {
 public:
  using Error::Error;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  const auto parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ojson file_entry(const std::string& path, std::span<const std::uint8_t> data) {
  return {{"path", path}, {"bytes", data.size()}, {"fnv1a64", hex64(fnv1a64(data))}};
}

ojson num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ojson comparison_json(const Comparison& c) {
  return {{"mean", num(c.mean)}, {"max", num(c.max)}, {"lo", num(c.lo)}, {"hi", num(c.hi)}, {"samples", c.samples}};
}

ImagePlane load_gray(const std::string& path, ojson& inputs) {
  const auto bytes = read_file(path);
  inputs.push_back(file_entry(path, bytes));
  return to_grayscale(load_pnm(bytes));
}

ResampleKernel parse_kernel(const std::string& s) {
  if (s == "bicubic") return ResampleKernel::bicubic;
  if (s == "nearest") return ResampleKernel::nearest;
  throw ParameterError("unknown resampling kernel '" + s + "'");
}

// Where a run's manifest goes; empty path means stdout.
struct Outcome {
  ojson manifest;
  std::string manifest_path;
  bool emit = true;
};

struct Context {
  bool write_manifest = true;
  std::optional<int> workers_override;
};

ojson manifest_head(const std::string& sub, const std::vector<std::string>& argv) {
  ojson m;
  m["tool"] = "msr";
  m["version"] = MSR_VERSION;
  m["subcommand"] = sub;
  m["argv"] = argv;
  return m;
}

// Numeric channel flags; they define the "custom" regime and are rejected
// alongside a named preset.
struct ChannelFlags {
  std::optional<double> noise_sigma;
  std::optional<int> blur_kernel;
  std::optional<double> blur_sigma;

  bool any() const { return noise_sigma || blur_kernel || blur_sigma; }
};

void add_channel_flags(CLI::App& app, ChannelFlags& c) {
  app.add_option("--noise-sigma", c.noise_sigma, "Custom regime: noise std (0-255 scale)");
  app.add_option("--blur-kernel", c.blur_kernel, "Custom regime: odd blur kernel size (1 = none)");
  app.add_option("--blur-sigma", c.blur_sigma, "Custom regime: blur std in pixels");
}

DegradePreset make_preset(const std::string& name, const ChannelFlags& c) {
  if (name != "custom") {
    if (c.any()) throw ParameterError("--noise-sigma/--blur-kernel/--blur-sigma need --regime custom");
    return DegradePreset::from_name(name);
  }
  DegradePreset p{"custom", c.noise_sigma.value_or(0.0), c.blur_kernel.value_or(1),
                  c.blur_sigma.value_or(0.0)};
  p.validate();
  return p;
}

ojson preset_json(const DegradePreset& p) {
  return {{"name", p.name}, {"noise_sigma", p.noise_sigma}, {"blur_kernel", p.blur_kernel},
          {"blur_sigma", p.blur_sigma}};
}

// ------------------------------------------------------------------ encode

struct EncodeOpts {
  std::string input;
  std::string out;
  int q = 75;
  std::string meta = "canny";
  CannyParams canny{};
  double grad_sigma = 1.0;
  int pool = 1;
  int scale = 4;
  std::string down_kernel = "bicubic";
};

void add_encode(CLI::App& app, EncodeOpts& o) {
  app.add_option("input", o.input, "HR input image (.pgm/.ppm)")->required();
  app.add_option("-o,--out", o.out, "Output prefix: writes <out>.msrb, <out>.msrm, <out>.manifest.json")->required();
  app.add_option("--q", o.q, "Base-layer quality factor")->check(CLI::Range(1, 100))->capture_default_str();
  app.add_option("--meta", o.meta, "Metadata kind")->check(CLI::IsMember({"none", "canny", "grad2"}))->capture_default_str();
  app.add_option("--canny-sigma", o.canny.gauss_sigma)->capture_default_str();
  app.add_option("--low", o.canny.low_thresh)->capture_default_str();
  app.add_option("--high", o.canny.high_thresh)->capture_default_str();
  app.add_option("--grad-sigma", o.grad_sigma)->capture_default_str();
  app.add_option("--pool", o.pool, "Metadata block pooling factor")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--scale", o.scale, "Downsampling factor for the base layer")->check(CLI::IsMember({1, 2, 4}))->capture_default_str();
  app.add_option("--down-kernel", o.down_kernel)->check(CLI::IsMember({"bicubic", "nearest"}))->capture_default_str();
}

Outcome run_encode(const EncodeOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  ojson inputs = ojson::array(), outputs = ojson::array();
  const ImagePlane full = load_gray(o.input, inputs);
  const int w = full.width() / o.scale * o.scale, h = full.height() / o.scale * o.scale;
  if (w == 0 || h == 0) throw ParameterError("input is smaller than the scale factor");
  const ImagePlane hr = crop(full, w, h);
  const ImagePlane lr = o.scale == 1 ? hr : resample(hr, w / o.scale, h / o.scale, parse_kernel(o.down_kernel));

  const auto base = base_encode(lr, QualityFactor(o.q));
  const auto base_bytes = serialize(base);
  write_file(o.out + ".msrb", base_bytes);
  outputs.push_back(file_entry(o.out + ".msrb", base_bytes));

  ojson results;
  results["hr"] = {{"width", w}, {"height", h}};
  results["lr"] = {{"width", lr.width()}, {"height", lr.height()}};
  std::uint64_t meta_bits = 0;
  if (o.meta != "none") {
    o.canny.validate();
    const MetadataPlane m = o.meta == "canny" ? canny(hr, o.canny) : gradient_2bit(hr, o.grad_sigma);
    const auto stream = meta_encode(downsample_metadata(m, o.pool));
    const auto meta_bytes = serialize(stream);
    write_file(o.out + ".msrm", meta_bytes);
    outputs.push_back(file_entry(o.out + ".msrm", meta_bytes));
    meta_bits = meta_rate(stream);
    results["meta_density"] = m.density();
    results["meta_grid"] = {{"width", stream.width}, {"height", stream.height}, {"depth", stream.depth}};
  }
  results["bits"] = {{"base", rate_of(base)}, {"meta", meta_bits}, {"total", rate_of(base) + meta_bits}};

  ojson params;
  params["q"] = o.q;
  params["meta"] = o.meta;
  params["canny"] = {{"sigma", o.canny.gauss_sigma}, {"low", o.canny.low_thresh}, {"high", o.canny.high_thresh}};
  params["grad_sigma"] = o.grad_sigma;
  params["pool"] = o.pool;
  params["scale"] = o.scale;
  params["down_kernel"] = o.down_kernel;

  auto m = manifest_head("encode", argv);
  m["params"] = params;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["results"] = results;
  out << "base " << rate_of(base) << " bits, meta " << meta_bits << " bits\n";
  return {m, o.out + ".manifest.json"};
}

// ----------------------------------------------------------------- receive

struct ReceiveOpts {
  std::string base;
  std::string meta;
  std::string regime = "NN";
  std::uint64_t seed = 0;
  std::string reconstructor = "edgeguided";
  double tau = kDefaultTau;
  bool no_gate = false;
  int scale = 4;
  std::string ref;
  std::string out;
  std::string order = "noise-then-blur";
  EdgeGuidedOptions edge{};
  ChannelFlags channel;
};

void add_receive(CLI::App& app, ReceiveOpts& o) {
  app.add_option("base", o.base, "Base-layer stream (.msrb)")->required();
  app.add_option("--meta", o.meta, "Metadata stream (.msrm); omitted means no metadata");
  app.add_option("--regime", o.regime)->check(CLI::IsMember({"NN", "LN", "HN", "custom"}))->capture_default_str();
  add_channel_flags(app, o.channel);
  app.add_option("--seed", o.seed)->capture_default_str();
  app.add_option("--reconstructor", o.reconstructor)->capture_default_str();
  app.add_option("--tau", o.tau, "Gate acceptance threshold")->capture_default_str();
  app.add_flag("--no-gate", o.no_gate, "Use metadata without verification");
  app.add_option("--scale", o.scale)->check(CLI::IsMember({1, 2, 4}))->capture_default_str();
  app.add_option("--ref", o.ref, "HR reference for metrics");
  app.add_option("-o,--out", o.out, "Output image; the manifest goes to <out>.manifest.json")->required();
  app.add_option("--order", o.order)->check(CLI::IsMember({"noise-then-blur", "blur-then-noise"}))->capture_default_str();
  app.add_option("--alpha", o.edge.alpha, "edgeguided sharpening gain")->capture_default_str();
}

Outcome run_receive(const ReceiveOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  ojson inputs = ojson::array(), outputs = ojson::array();
  const auto base_bytes = read_file(o.base);
  inputs.push_back(file_entry(o.base, base_bytes));
  const auto order = o.order == "noise-then-blur" ? DegradeOrder::noise_then_blur : DegradeOrder::blur_then_noise;
  const auto preset = make_preset(o.regime, o.channel);
  const ImagePlane lq = degrade(base_decode(parse_base_container(base_bytes)), preset, ChannelSeed{o.seed}, order);
  const int w = lq.width() * o.scale, h = lq.height() * o.scale;

  ojson results;
  std::optional<MetadataPlane> m;
  const MetadataPlane* m_tilde = nullptr;
  if (!o.meta.empty()) {
    const auto meta_bytes = read_file(o.meta);
    inputs.push_back(file_entry(o.meta, meta_bytes));
    m = expand_metadata(meta_decode(parse_meta_container(meta_bytes)), w, h);
    const GateDecision g = o.no_gate ? GateDecision{true, 1.0, 0.0} : gate(lq, *m, o.scale, o.tau);
    results["gate"] = {{"v", g.v}, {"score", num(g.score)}, {"tau", num(g.tau)}, {"enabled", !o.no_gate}};
    if (g.v) m_tilde = &*m;
  } else {
    results["gate"] = nullptr;
  }
  results["metadata_used"] = m_tilde != nullptr;

  const auto registry = ReconstructorRegistry::with_defaults(o.edge);
  const ImagePlane sr = reconstruct(registry, o.reconstructor, lq, m_tilde, o.scale);
  const auto sr_bytes = save_pnm(ImageFrame(sr));
  write_file(o.out, sr_bytes);
  outputs.push_back(file_entry(o.out, sr_bytes));

  if (!o.ref.empty()) {
    ImagePlane ref = load_gray(o.ref, inputs);
    if (ref.width() < w || ref.height() < h || ref.width() - w >= o.scale || ref.height() - h >= o.scale)
      throw ParameterError("reference dimensions do not match the reconstruction");
    const auto r = evaluate(crop(ref, w, h), sr);
    results["metrics"] = {{"mse", num(r.mse)}, {"psnr", num(r.psnr)}, {"ssim", num(r.ssim)}};
    out << "psnr " << r.psnr << " dB, ssim " << r.ssim << "\n";
  } else {
    results["metrics"] = nullptr;
  }

  ojson params;
  params["regime"] = preset_json(preset);
  params["order"] = o.order;
  params["seed"] = o.seed;
  params["reconstructor"] = o.reconstructor;
  params["alpha"] = o.edge.alpha;
  params["tau"] = o.tau;
  params["gate"] = !o.no_gate;
  params["scale"] = o.scale;

  auto man = manifest_head("receive", argv);
  man["params"] = params;
  man["inputs"] = inputs;
  man["outputs"] = outputs;
  man["results"] = results;
  return {man, o.out + ".manifest.json"};
}

// ------------------------------------------------------------------- sweep

struct SweepOpts {
  std::string corpus;
  std::string out_dir;
  std::vector<std::string> regimes{"NN", "LN", "HN"};
  std::vector<int> qs{10, 20, 30, 40, 50, 60, 70, 80, 90, 95};
  std::string meta = "canny";
  int meta_levels = 5;
  std::vector<int> pools{1, 2, 4};
  double ratio = 1.5;
  CannyParams canny{};
  double grad_sigma = 1.0;
  std::vector<std::string> reconstructors{"bicubic", "edgeguided"};
  double lambda = 0.0;
  std::string d_kind = "mse";
  std::string format = "csv";
  std::uint64_t seed = 0;
  int scale = 4;
  double tau = kDefaultTau;
  bool no_gate = false;
  double alpha = 0.6;
  int workers = 1;
  bool per_image = false;
  ChannelFlags channel;
};

void add_sweep(CLI::App& app, SweepOpts& o) {
  app.add_option("--corpus", o.corpus, "Directory of .pgm/.ppm/.pnm images")->required();
  app.add_option("--out-dir", o.out_dir, "Writes curves.<fmt> and manifest.json here")->required();
  app.add_option("--regimes", o.regimes)->delimiter(',')->check(CLI::IsMember({"NN", "LN", "HN", "custom"}))->capture_default_str();
  add_channel_flags(app, o.channel);
  app.add_option("--qs", o.qs, "Base-layer quality factors")->delimiter(',')->check(CLI::Range(1, 100))->capture_default_str();
  app.add_option("--meta", o.meta)->check(CLI::IsMember({"none", "canny", "grad2"}))->capture_default_str();
  app.add_option("--meta-levels", o.meta_levels)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--pools", o.pools)->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--ratio", o.ratio, "Threshold step between sparsity levels")->capture_default_str();
  app.add_option("--canny-sigma", o.canny.gauss_sigma)->capture_default_str();
  app.add_option("--low", o.canny.low_thresh)->capture_default_str();
  app.add_option("--high", o.canny.high_thresh)->capture_default_str();
  app.add_option("--grad-sigma", o.grad_sigma)->capture_default_str();
  app.add_option("--reconstructors", o.reconstructors)->delimiter(',')->capture_default_str();
  app.add_option("--lambda", o.lambda, "Lagrange multiplier (distortion per bit)")->required();
  app.add_option("--d-kind", o.d_kind)->check(CLI::IsMember({"mse", "one_minus_ssim"}))->capture_default_str();
  app.add_option("--out", o.format, "Curve file format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--seed", o.seed)->capture_default_str();
  app.add_option("--scale", o.scale)->check(CLI::IsMember({1, 2, 4}))->capture_default_str();
  app.add_option("--tau", o.tau)->capture_default_str();
  app.add_flag("--no-gate", o.no_gate);
  app.add_option("--alpha", o.alpha)->capture_default_str();
  app.add_option("--workers", o.workers)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--per-image", o.per_image, "Also emit one curve per corpus image");
}

std::vector<std::pair<std::string, ImagePlane>> load_corpus(const std::string& dir, ojson& inputs) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("corpus directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")) files.push_back(e.path());
  }
  if (ec) throw IoError("cannot list '" + dir + "'");
  if (files.empty()) throw ParameterError("corpus directory '" + dir + "' holds no images");
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, ImagePlane>> out;
  for (const auto& f : files) out.emplace_back(f.stem().string(), load_gray(f.string(), inputs));
  return out;
}

Outcome run_sweep(const SweepOpts& o, const std::vector<std::string>& argv, const Context& ctx,
                  std::ostream& out) {
  ojson inputs = ojson::array(), outputs = ojson::array();
  const auto corpus = load_corpus(o.corpus, inputs);
  const auto registry = ReconstructorRegistry::with_defaults();
  for (const auto& r : o.reconstructors) (void)registry.get(r);

  CurveConfig base;
  base.quality_factors = o.qs;
  base.scale = o.scale;
  base.seed = ChannelSeed{o.seed};
  base.d_kind = parse_distortion_kind(o.d_kind);
  base.lambda = o.lambda;
  base.tau = o.tau;
  base.use_gate = !o.no_gate;
  base.edge.alpha = o.alpha;
  base.workers = ctx.workers_override.value_or(o.workers);
  base.meta.levels = o.meta_levels;
  base.meta.pools = o.pools;
  base.meta.ratio = o.ratio;
  base.meta.canny = o.canny;
  base.meta.grad_sigma = o.grad_sigma;
  (void)lagrangian(0.0, o.lambda, 0.0);

  struct Job {
    std::string label;
    CurveConfig cfg;
  };
  std::vector<Job> jobs;
  if (o.channel.any() && std::find(o.regimes.begin(), o.regimes.end(), "custom") == o.regimes.end())
    throw ParameterError("--noise-sigma/--blur-kernel/--blur-sigma need \"custom\" in --regimes");
  ojson presets = ojson::array();
  for (const auto& regime : o.regimes) {
    ChannelFlags flags = regime == "custom" ? o.channel : ChannelFlags{};
    presets.push_back(preset_json(make_preset(regime, flags)));
  }
  for (const auto& regime : o.regimes)
    for (const auto& recon : o.reconstructors) {
      CurveConfig cfg = base;
      cfg.regime = make_preset(regime, regime == "custom" ? o.channel : ChannelFlags{});
      cfg.reconstructor = recon;
      cfg.meta.kind = MetaKind::none;
      jobs.push_back({regime + "/" + recon + "/none", cfg});
      if (o.meta != "none" && registry.get(recon).uses_metadata()) {
        cfg.meta.kind = parse_meta_kind(o.meta);
        jobs.push_back({regime + "/" + recon + "/" + o.meta, cfg});
      }
    }

  std::vector<ImagePlane> images;
  for (const auto& [name, img] : corpus) images.push_back(img);
  std::vector<RDCurve> curves;
  ojson labels = ojson::array();
  for (auto& job : jobs) {
    job.cfg.method = job.label;
    curves.push_back(build_curve(images, job.cfg));
    labels.push_back({{"method", job.label}, {"points", curves.back().points().size()}});
    if (o.per_image)
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        CurveConfig one = job.cfg;
        one.method = corpus[i].first + ":" + job.label;
        one.seed = ChannelSeed{o.seed + i};
        curves.push_back(build_curve({corpus[i].second}, one));
        labels.push_back({{"method", one.method}, {"points", curves.back().points().size()}});
      }
  }

  const auto fmt = o.format == "csv" ? CurveFormat::csv : CurveFormat::json;
  const auto bytes = emit(curves, fmt);
  const std::string path = (fs::path(o.out_dir) / ("curves." + o.format)).string();
  write_file(path, bytes);
  outputs.push_back(file_entry(path, bytes));

  ojson params;
  params["regimes"] = presets;
  params["qs"] = o.qs;
  params["meta"] = o.meta;
  params["meta_levels"] = o.meta_levels;
  params["pools"] = o.pools;
  params["ratio"] = o.ratio;
  params["canny"] = {{"sigma", o.canny.gauss_sigma}, {"low", o.canny.low_thresh}, {"high", o.canny.high_thresh}};
  params["grad_sigma"] = o.grad_sigma;
  params["reconstructors"] = o.reconstructors;
  params["alpha"] = o.alpha;
  params["lambda"] = o.lambda;
  params["d_kind"] = o.d_kind;
  params["seed"] = o.seed;
  params["scale"] = o.scale;
  params["tau"] = o.tau;
  params["gate"] = !o.no_gate;
  params["per_image"] = o.per_image;
  params["format"] = o.format;

  auto m = manifest_head("sweep", argv);
  m["params"] = params;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["results"] = {{"curves", labels}};
  out << "wrote " << curves.size() << " curves to " << path << "\n";
  return {m, (fs::path(o.out_dir) / "manifest.json").string()};
}

// ---------------------------------------------------------- verify-theorem

struct TheoremOpts {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  std::vector<int> alphabets{4, 4, 4};
  std::string out;
};

void add_theorem(CLI::App& app, TheoremOpts& o) {
  app.add_option("--samples", o.samples)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", o.seed)->capture_default_str();
  app.add_option("--alphabets", o.alphabets, "Maximum alphabet sizes x,y,m")
      ->delimiter(',')
      ->expected(3)
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  app.add_option("-o,--out", o.out, "Write the JSON report here instead of stdout");
}

Outcome run_theorem(const TheoremOpts& o, const std::vector<std::string>& argv) {
  info::TheoremSweepConfig cfg;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.max_x = o.alphabets[0];
  cfg.max_y = o.alphabets[1];
  cfg.max_m = o.alphabets[2];
  const auto r = info::verify_theorem(cfg);

  ojson results;
  results["passed"] = r.passed();
  results["joints"] = r.joints;
  results["gated_pairs"] = r.gated_pairs;
  results["nll_pairs"] = r.nll_pairs;
  results["min_entropy_slack"] = num(r.min_entropy_slack);
  results["min_mutual_info"] = num(r.min_mutual_info);
  results["max_dual_gap"] = num(r.max_dual_gap);
  results["min_gated_slack"] = num(r.min_gated_slack);
  results["max_nll_gap"] = num(r.max_nll_gap);
  results["max_exact_model_kl"] = num(r.max_exact_model_kl);
  results["min_bound_slack"] = num(r.min_bound_slack);
  results["tight_case_gap"] = num(r.tight_case_gap);
  results["failures"] = r.failures;

  auto m = manifest_head("verify-theorem", argv);
  m["params"] = {{"samples", o.samples}, {"seed", o.seed}, {"alphabets", o.alphabets}};
  m["inputs"] = ojson::array();
  m["outputs"] = ojson::array();
  m["results"] = results;
  return {m, o.out};
}

// ----------------------------------------------------------------- compare

struct CompareOpts {
  std::string ref;
  std::string test;
  std::string ref_method;
  std::string test_method;
  std::string metric = "psnr";
  bool log_rate = false;
  int grid = kComparisonGrid;
  std::string out;
};

void add_compare(CLI::App& app, CompareOpts& o) {
  app.add_option("--ref", o.ref, "Reference curve file (.csv or .json)")->required();
  app.add_option("--test", o.test, "Test curve file (.csv or .json)")->required();
  app.add_option("--ref-method", o.ref_method, "Curve label to use when the file holds several");
  app.add_option("--test-method", o.test_method, "Curve label to use when the file holds several");
  app.add_option("--metric", o.metric)->check(CLI::IsMember({"psnr", "ssim"}))->capture_default_str();
  app.add_flag("--log-rate", o.log_rate, "Interpolate in log(rate)");
  app.add_option("--grid", o.grid)->check(CLI::Range(2, 100000))->capture_default_str();
  app.add_option("-o,--out", o.out, "Write the JSON report here instead of stdout");
}

RDCurve pick_curve(const std::string& path, const std::string& method, ojson& inputs) {
  const auto bytes = read_file(path);
  inputs.push_back(file_entry(path, bytes));
  const auto fmt = fs::path(path).extension() == ".json" ? CurveFormat::json : CurveFormat::csv;
  auto curves = parse_curves(bytes, fmt);
  if (method.empty()) {
    if (curves.size() != 1)
      throw ParameterError("'" + path + "' holds " + std::to_string(curves.size()) + " curves; pick one with --*-method");
    return curves.front();
  }
  for (auto& c : curves)
    if (c.method() == method) return c;
  throw ParameterError("no curve '" + method + "' in '" + path + "'");
}

Outcome run_compare(const CompareOpts& o, const std::vector<std::string>& argv) {
  ojson inputs = ojson::array();
  const RDCurve ref = pick_curve(o.ref, o.ref_method, inputs);
  const RDCurve test = pick_curve(o.test, o.test_method, inputs);
  const auto metric = parse_quality_metric(o.metric);
  const auto axis = o.log_rate ? RateAxis::log_rate : RateAxis::linear;

  ojson results;
  results["ref"] = ref.method();
  results["test"] = test.method();
  results["saving_pct"] = comparison_json(bitrate_saving_at_matched_quality(ref, test, metric, axis, o.grid));
  results["gain"] = comparison_json(quality_gain_at_matched_rate(ref, test, metric, axis, o.grid));

  auto m = manifest_head("compare", argv);
  m["params"] = {{"metric", o.metric}, {"rate_axis", o.log_rate ? "log" : "linear"}, {"grid", o.grid}};
  m["inputs"] = inputs;
  m["outputs"] = ojson::array();
  m["results"] = results;
  return {m, o.out};
}

// -------------------------------------------------------------- gen-corpus

struct CorpusOpts {
  std::string out_dir;
  int size = corpus::kSize;
};

void add_corpus(CLI::App& app, CorpusOpts& o) {
  app.add_option("--out-dir", o.out_dir)->required();
  app.add_option("--size", o.size)->check(CLI::Range(16, 4096))->capture_default_str();
}

Outcome run_corpus(const CorpusOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  ojson outputs = ojson::array(), items = ojson::array();
  for (const auto& it : corpus::all(o.size)) {
    const auto bytes = save_pnm(ImageFrame(it.image));
    const auto path = (fs::path(o.out_dir) / (it.name + ".pgm")).string();
    write_file(path, bytes);
    outputs.push_back(file_entry(path, bytes));
    items.push_back({{"name", it.name}, {"edge_rich", it.edge_rich}, {"smooth", it.smooth}});
  }
  auto m = manifest_head("gen-corpus", argv);
  m["params"] = {{"size", o.size}};
  m["inputs"] = ojson::array();
  m["outputs"] = outputs;
  m["results"] = {{"images", items}};
  out << "wrote " << items.size() << " images to " << o.out_dir << "\n";
  return {m, (fs::path(o.out_dir) / "manifest.json").string()};
}

// ------------------------------------------------------------------ driver

struct ReplayOpts {
  std::string manifest;
  bool check = false;
  std::optional<int> workers;
};

Outcome dispatch(const std::vector<std::string>& args, const Context& ctx, std::ostream& out,
                 std::ostream& err, int& help_code);

Outcome run_replay(const ReplayOpts& o, std::ostream& out, std::ostream& err) {
  const auto bytes = read_file(o.manifest);
  ojson recorded;
  try {
    recorded = ojson::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest", e.what());
  }
  if (!recorded.is_object() || recorded.value("tool", "") != "msr" || !recorded.contains("argv"))
    throw FormatError("manifest", "not an msr run manifest");
  const auto argv = recorded.at("argv").get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw ParameterError("a replay manifest cannot be replayed");

  ojson report;
  report["replayed"] = recorded.value("subcommand", "");
  bool identical = true;
  ojson inputs = ojson::array();
  for (const auto& in : recorded.value("inputs", ojson::array())) {
    const auto path = in.at("path").get<std::string>();
    const auto actual = hex64(fnv1a64(read_file(path)));
    const bool same = actual == in.at("fnv1a64").get<std::string>();
    identical = identical && same;
    inputs.push_back({{"path", path}, {"match", same}});
  }
  report["inputs"] = inputs;
  if (!identical) throw ReplayMismatch("inputs changed since the manifest was written");

  Context inner;
  inner.write_manifest = false;
  inner.workers_override = o.workers;
  int help_code = -1;
  const Outcome again = dispatch(argv, inner, out, err, help_code);

  ojson outputs = ojson::array();
  for (const auto& rec : recorded.value("outputs", ojson::array())) {
    const auto path = rec.at("path").get<std::string>();
    const auto actual = hex64(fnv1a64(read_file(path)));
    const bool same = actual == rec.at("fnv1a64").get<std::string>();
    identical = identical && same;
    outputs.push_back({{"path", path}, {"expected", rec.at("fnv1a64")}, {"actual", actual}, {"match", same}});
  }
  const bool results_same = again.manifest.value("results", ojson()) == recorded.value("results", ojson());
  identical = identical && results_same;
  report["outputs"] = outputs;
  report["results_match"] = results_same;
  report["identical"] = identical;
  out << report.dump(2) << "\n";
  if (o.check && !identical) throw ReplayMismatch("replayed outputs differ from the manifest");
  return {report, "", false};
}

Outcome dispatch(const std::vector<std::string>& args, const Context& ctx, std::ostream& out,
                 std::ostream& err, int& help_code) {
  help_code = -1;
  CLI::App app{"Metadata-assisted super-resolution toolkit", "msr"};
  app.set_version_flag("--version", MSR_VERSION);
  app.require_subcommand(1);

  EncodeOpts enc;
  ReceiveOpts rec;
  SweepOpts swp;
  TheoremOpts thm;
  CompareOpts cmp;
  CorpusOpts gen;
  ReplayOpts rep;
  int replay_workers = 0;

  auto* c_enc = app.add_subcommand("encode", "Sender: base layer + metadata streams");
  add_encode(*c_enc, enc);
  auto* c_rec = app.add_subcommand("receive", "Receiver: decode, degrade, gate, reconstruct, score");
  add_receive(*c_rec, rec);
  auto* c_swp = app.add_subcommand("sweep", "Rate-distortion curves over a corpus");
  add_sweep(*c_swp, swp);
  auto* c_thm = app.add_subcommand("verify-theorem", "Randomized check of the side-information inequalities");
  add_theorem(*c_thm, thm);
  auto* c_cmp = app.add_subcommand("compare", "Matched-quality saving and matched-rate gain between curves");
  add_compare(*c_cmp, cmp);
  auto* c_gen = app.add_subcommand("gen-corpus", "Write the bundled synthetic corpus");
  add_corpus(*c_gen, gen);
  auto* c_rep = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  c_rep->add_option("manifest", rep.manifest)->required();
  c_rep->add_flag("--check", rep.check, "Exit 6 unless outputs are byte-identical");
  auto* w_opt = c_rep->add_option("--workers", replay_workers, "Override the sweep worker count")
                    ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    help_code = app.exit(e, out, err) == 0 ? kOk : kUsage;
    return {ojson(), "", false};
  }

  std::vector<std::string> argv = args;
  if (c_enc->parsed()) return run_encode(enc, argv, out);
  if (c_rec->parsed()) return run_receive(rec, argv, out);
  if (c_swp->parsed()) return run_sweep(swp, argv, ctx, out);
  if (c_thm->parsed()) return run_theorem(thm, argv);
  if (c_cmp->parsed()) return run_compare(cmp, argv);
  if (c_gen->parsed()) return run_corpus(gen, argv, out);
  if (!ctx.write_manifest) throw ParameterError("a replay manifest cannot be replayed");
  if (w_opt->count() > 0) rep.workers = replay_workers;
  return run_replay(rep, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Context ctx;
    int help_code = -1;
    Outcome o = dispatch(args, ctx, out, err, help_code);
    if (help_code >= 0) return help_code;
    if (!o.emit) return kOk;
    const auto text = o.manifest.dump(2) + "\n";
    if (o.manifest_path.empty()) {
      out << text;
    } else {
      write_file(o.manifest_path, Bytes(text.begin(), text.end()));
    }
    if (o.manifest.value("subcommand", "") == "verify-theorem" && !o.manifest["results"]["passed"].get<bool>())
      throw TheoremFailure("theorem check failed");
    return kOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const NoOverlapError& e) {
    err << "error: " << e.what() << "\n";
    return kNoOverlap;
  } catch (const ReplayMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kReplayMismatch;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RegistryError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace msr::cli
