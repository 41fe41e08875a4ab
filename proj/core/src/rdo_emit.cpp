#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msr/rdo.hpp"

namespace msr {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kCsvHeader =
    "method,regime,reconstructor,q,meta_level,tau,base_bits,meta_bits,total_bits,psnr_db,ssim,d_kind,lambda,j";

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, const char* field) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw FormatError(field, "bad number '" + s + "'");
  return v;
}

template <typename T>
T parse_int(const std::string& s, const char* field) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw FormatError(field, "bad integer '" + s + "'");
  return v;
}

const std::string& csv_safe(const std::string& s) {
  if (s.find_first_of(",\"\r\n") != std::string::npos)
    throw ParameterError("label '" + s + "' cannot be written to CSV");
  return s;
}

double cost_of(const RDCurve& c, const RatePoint& p) {
  return lagrangian(p.distortion(c.d_kind()), c.lambda(), static_cast<double>(p.total_bits)).j;
}

void check_curves(std::span<const RDCurve> curves) {
  if (curves.empty()) throw ParameterError("nothing to emit");
  std::set<std::string> seen;
  for (const auto& c : curves) {
    if (c.points().empty()) throw ParameterError("curve '" + c.method() + "' is empty");
    if (!seen.insert(c.method()).second) throw ParameterError("duplicate curve label '" + c.method() + "'");
  }
}

Bytes emit_csv(std::span<const RDCurve> curves) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& c : curves)
    for (const auto& p : c.points()) {
      os << csv_safe(c.method()) << ',' << csv_safe(p.regime) << ',' << csv_safe(p.reconstructor) << ','
         << p.q << ',' << csv_safe(p.meta_level) << ',' << fmt(p.tau) << ',' << p.base_bits << ','
         << p.meta_bits << ',' << p.total_bits << ',' << fmt(p.psnr) << ',' << fmt(p.ssim) << ','
         << to_string(c.d_kind()) << ',' << fmt(c.lambda()) << ',' << fmt(cost_of(c, p)) << '\n';
    }
  const auto s = os.str();
  return Bytes(s.begin(), s.end());
}

ojson point_json(const RDCurve& c, const RatePoint& p) {
  auto num = [](double v) { return std::isfinite(v) ? ojson(v) : ojson(fmt(v)); };
  ojson j;
  j["method"] = c.method();
  j["regime"] = p.regime;
  j["reconstructor"] = p.reconstructor;
  j["q"] = p.q;
  j["meta_level"] = p.meta_level;
  j["tau"] = num(p.tau);
  j["base_bits"] = p.base_bits;
  j["meta_bits"] = p.meta_bits;
  j["total_bits"] = p.total_bits;
  j["psnr_db"] = num(p.psnr);
  j["ssim"] = num(p.ssim);
  j["d_kind"] = to_string(c.d_kind());
  j["lambda"] = num(c.lambda());
  j["j"] = num(cost_of(c, p));
  return j;
}

Bytes emit_json(std::span<const RDCurve> curves) {
  ojson root = ojson::object();
  for (const auto& c : curves) {
    ojson pts = ojson::array();
    for (const auto& p : c.points()) pts.push_back(point_json(c, p));
    root[c.method()] = {{"d_kind", to_string(c.d_kind())}, {"lambda", c.lambda()}, {"points", std::move(pts)}};
  }
  const auto s = root.dump(2) + "\n";
  return Bytes(s.begin(), s.end());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct PendingCurve {
  std::string method;
  DistortionKind d_kind;
  double lambda;
  std::vector<RatePoint> points;
};

std::vector<RDCurve> finish(std::vector<PendingCurve>& pending) {
  std::vector<RDCurve> out;
  for (auto& p : pending) out.push_back(RDCurve::from_points(p.method, std::move(p.points), p.d_kind, p.lambda));
  return out;
}

std::vector<RDCurve> parse_csv(std::span<const std::uint8_t> bytes) {
  std::istringstream is(std::string(bytes.begin(), bytes.end()));
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw FormatError("header", "unexpected CSV header");
  std::vector<PendingCurve> pending;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 14) throw FormatError("row " + std::to_string(row), "expected 14 columns");
    RatePoint p;
    p.regime = f[1];
    p.reconstructor = f[2];
    p.q = parse_int<int>(f[3], "q");
    p.meta_level = f[4];
    p.tau = parse_double(f[5], "tau");
    p.base_bits = parse_int<std::uint64_t>(f[6], "base_bits");
    p.meta_bits = parse_int<std::uint64_t>(f[7], "meta_bits");
    p.total_bits = parse_int<std::uint64_t>(f[8], "total_bits");
    p.psnr = parse_double(f[9], "psnr_db");
    p.ssim = parse_double(f[10], "ssim");
    const auto d_kind = parse_distortion_kind(f[11]);
    const double lambda = parse_double(f[12], "lambda");
    if (pending.empty() || pending.back().method != f[0]) {
      for (const auto& c : pending)
        if (c.method == f[0]) throw FormatError("method", "rows of curve '" + f[0] + "' are not contiguous");
      pending.push_back({f[0], d_kind, lambda, {}});
    } else if (pending.back().d_kind != d_kind || pending.back().lambda != lambda) {
      throw FormatError("d_kind", "inconsistent d_kind/lambda within curve '" + f[0] + "'");
    }
    pending.back().points.push_back(std::move(p));
  }
  if (pending.empty()) throw FormatError("rows", "no curves in CSV");
  return finish(pending);
}

double json_num(const ojson& j, const char* field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>(), field);
  throw FormatError(field, "expected a number");
}

std::vector<RDCurve> parse_json(std::span<const std::uint8_t> bytes) {
  ojson root;
  try {
    root = ojson::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("json", e.what());
  }
  if (!root.is_object() || root.empty()) throw FormatError("json", "expected a non-empty object of curves");
  std::vector<PendingCurve> pending;
  try {
    for (const auto& [method, c] : root.items()) {
      PendingCurve pc{method, parse_distortion_kind(c.at("d_kind").get<std::string>()),
                      json_num(c.at("lambda"), "lambda"), {}};
      for (const auto& j : c.at("points")) {
        RatePoint p;
        p.regime = j.at("regime").get<std::string>();
        p.reconstructor = j.at("reconstructor").get<std::string>();
        p.q = j.at("q").get<int>();
        p.meta_level = j.at("meta_level").get<std::string>();
        p.tau = json_num(j.at("tau"), "tau");
        p.base_bits = j.at("base_bits").get<std::uint64_t>();
        p.meta_bits = j.at("meta_bits").get<std::uint64_t>();
        p.total_bits = j.at("total_bits").get<std::uint64_t>();
        p.psnr = json_num(j.at("psnr_db"), "psnr_db");
        p.ssim = json_num(j.at("ssim"), "ssim");
        pc.points.push_back(std::move(p));
      }
      pending.push_back(std::move(pc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("json", e.what());
  }
  return finish(pending);
}

}  // namespace

Bytes emit(std::span<const RDCurve> curves, CurveFormat format) {
  check_curves(curves);
  return format == CurveFormat::csv ? emit_csv(curves) : emit_json(curves);
}

std::vector<RDCurve> parse_curves(std::span<const std::uint8_t> bytes, CurveFormat format) {
  return format == CurveFormat::csv ? parse_csv(bytes) : parse_json(bytes);
}

}  // namespace msr
