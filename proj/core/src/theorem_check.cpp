#include "msr/theorem_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "msr/errors.hpp"

namespace msr::info {

namespace {

constexpr std::size_t kMaxReportedFailures = 20;

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = gamma(rng);
    sum += x;
  }
  if (sum <= 0.0) {
    // All draws underflowed; fall back to a point mass.
    std::fill(v.begin(), v.end(), 0.0);
    v[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

DiscreteJoint random_joint(std::mt19937_64& rng, const TheoremSweepConfig& cfg) {
  std::uniform_int_distribution<int> dx(1, cfg.max_x), dy(1, cfg.max_y), dm(1, cfg.max_m);
  const int nx = dx(rng), ny = dy(rng), nm = dm(rng);
  static constexpr double kAlphas[] = {0.05, 0.2, 1.0, 5.0};
  const double alpha = kAlphas[std::uniform_int_distribution<int>(0, 3)(rng)];
  auto p = dirichlet(rng, static_cast<std::size_t>(nx) * ny * nm, alpha);

  // One joint in four gets structural zeros.
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    std::bernoulli_distribution drop(0.5);
    double sum = 0.0;
    for (auto& x : p) {
      if (drop(rng)) x = 0.0;
      sum += x;
    }
    if (sum > 0.0)
      for (auto& x : p) x /= sum;
    else
      p = dirichlet(rng, p.size(), 1.0);
  }
  return DiscreteJoint(nx, ny, nm, std::move(p));
}

GateFunction random_gate(std::mt19937_64& rng, int ny, int nm) {
  const int mode = std::uniform_int_distribution<int>(0, 9)(rng);
  if (mode == 0) return GateFunction::constant(ny, nm, true);
  if (mode == 1) return GateFunction::constant(ny, nm, false);
  std::bernoulli_distribution accept(0.5);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(ny) * nm);
  for (auto& a : v) a = accept(rng);
  return GateFunction(ny, nm, std::move(v));
}

ModelConditional random_model(std::mt19937_64& rng, int nx, int ny, int nm) {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(nx) * ny * nm);
  for (int row = 0; row < ny * nm; ++row) {
    auto r = dirichlet(rng, nx, 1.0);
    // Keep the model strictly positive so the NLL is finite.
    double s = 0.0;
    for (auto& x : r) {
      x = 0.999 * x + 0.001 / nx;
      s += x;
    }
    for (auto& x : r) p.push_back(x / s);
  }
  return ModelConditional(nx, ny, nm, std::move(p));
}

class Checker {
 public:
  explicit Checker(TheoremReport& r) : r_(r) {}

  void fail(const std::string& what) {
    if (r_.failures.size() < kMaxReportedFailures) r_.failures.push_back(what);
  }

  void joint(const DiscreteJoint& q, std::uint64_t id) {
    ++r_.joints;
    const double hxy = cond_entropy(q, Var::X, {Var::Y});
    const double hxym = cond_entropy(q, Var::X, {Var::Y, Var::M});
    const double slack = hxy - hxym;
    r_.min_entropy_slack = std::min(r_.min_entropy_slack, slack);
    if (slack < -kNonNegTol) fail(tag(id) + "H(X|Y,M) > H(X|Y)");

    try {
      const auto mi = cond_mutual_info(q);
      r_.min_mutual_info = std::min(r_.min_mutual_info, std::min(mi.via_entropy, mi.via_kl));
      r_.max_dual_gap = std::max(r_.max_dual_gap, std::abs(mi.via_entropy - mi.via_kl));
      const double bound = entropy(q, Var::M) - mi.value();
      r_.min_bound_slack = std::min(r_.min_bound_slack, bound);
      if (bound < -kNonNegTol) fail(tag(id) + "I(X;M|Y) > H(M)");
    } catch (const ConsistencyError& e) {
      fail(tag(id) + e.what());
    }
  }

  void gated(const DiscreteJoint& q, const GateFunction& v, std::uint64_t id) {
    ++r_.gated_pairs;
    const auto g = apply_gate(q, v);
    const double slack = cond_entropy(q, Var::X, {Var::Y}) - cond_entropy(g, Var::X, {Var::Y, Var::M});
    r_.min_gated_slack = std::min(r_.min_gated_slack, slack);
    if (slack < -kNonNegTol) fail(tag(id) + "gating increased H(X|Y,M~)");
  }

  void nll(const DiscreteJoint& q, const ModelConditional& p, std::uint64_t id) {
    ++r_.nll_pairs;
    try {
      const auto gap = nll_gap(q, p);
      r_.max_nll_gap = std::max(r_.max_nll_gap, std::abs(gap.nll - (gap.entropy + gap.kl)));
      if (gap.kl < -kNonNegTol) fail(tag(id) + "negative KL in NLL decomposition");
      const auto exact = nll_gap(q, ModelConditional::from_joint(q));
      r_.max_exact_model_kl = std::max(r_.max_exact_model_kl, std::abs(exact.kl));
      if (std::abs(exact.kl) >= kNonNegTol) fail(tag(id) + "exact model has non-zero KL");
    } catch (const ConsistencyError& e) {
      fail(tag(id) + e.what());
    }
  }

 private:
  static std::string tag(std::uint64_t id) { return "sample " + std::to_string(id) + ": "; }
  TheoremReport& r_;
};

DiscreteJoint equal_xm_constant_y(int k) {
  std::vector<double> p(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i) * k + i] = 1.0 / k;
  return DiscreteJoint(k, 1, k, std::move(p));
}

}  // namespace

std::vector<DiscreteJoint> degenerate_joints() {
  std::vector<DiscreteJoint> out;
  out.push_back(DiscreteJoint(1, 1, 1, {1.0}));
  out.push_back(equal_xm_constant_y(2));
  out.push_back(equal_xm_constant_y(4));
  {
    // Point mass in a 4x4x4 table.
    std::vector<double> p(64, 0.0);
    p[37] = 1.0;
    out.push_back(DiscreteJoint(4, 4, 4, std::move(p)));
  }
  {
    // M constant, X uniform and independent of Y.
    std::vector<double> p(4 * 4 * 1, 1.0 / 16);
    out.push_back(DiscreteJoint(4, 4, 1, std::move(p)));
  }
  {
    // X = Y uniform, M independent uniform: M carries nothing beyond Y.
    std::vector<double> p(3 * 3 * 2, 0.0);
    for (int v = 0; v < 3; ++v)
      for (int m = 0; m < 2; ++m) p[(v * 3 + v) * 2 + m] = 1.0 / 6;
    out.push_back(DiscreteJoint(3, 3, 2, std::move(p)));
  }
  {
    // X = M XOR Y on bits: pairwise independent, jointly determined.
    std::vector<double> p(8, 0.0);
    for (int y = 0; y < 2; ++y)
      for (int m = 0; m < 2; ++m) p[((y ^ m) * 2 + y) * 2 + m] = 0.25;
    out.push_back(DiscreteJoint(2, 2, 2, std::move(p)));
  }
  {
    // Near-degenerate: one dominant cell, the rest at 1e-15.
    std::vector<double> p(27, 1e-15);
    p[13] = 1.0 - 26e-15;
    out.push_back(DiscreteJoint(3, 3, 3, std::move(p)));
  }
  return out;
}

TheoremReport verify_theorem(const TheoremSweepConfig& cfg) {
  for (int n : {cfg.max_x, cfg.max_y, cfg.max_m})
    if (n < 1 || n > kMaxAlphabet) throw ParameterError("alphabet bounds must be in [1, 16]");

  TheoremReport report;
  Checker check(report);
  std::mt19937_64 rng(cfg.seed);

  std::uint64_t id = 0;
  for (const auto& q : degenerate_joints()) {
    check.joint(q, id);
    check.gated(q, GateFunction::constant(q.ny(), q.nm(), false), id);
    check.gated(q, random_gate(rng, q.ny(), q.nm()), id);
    check.nll(q, ModelConditional::uniform(q.nx(), q.ny(), q.nm()), id);
    ++id;
  }
  for (std::uint64_t i = 0; i < cfg.samples; ++i, ++id) {
    const auto q = random_joint(rng, cfg);
    check.joint(q, id);
    const auto v = random_gate(rng, q.ny(), q.nm());
    check.gated(q, v, id);
    const auto g = apply_gate(q, v);
    check.nll(g, random_model(rng, g.nx(), g.ny(), g.nm()), id);
  }

  for (int k : {2, 4}) {
    const auto b = metadata_entropy_bound(equal_xm_constant_y(k));
    report.tight_case_gap = std::max(report.tight_case_gap, std::abs(b.i_xmy - b.h_m));
    if (std::abs(b.i_xmy - b.h_m) > kNonNegTol) check.fail("X = M case: bound not tight");
  }
  return report;
}

}  // namespace msr::info
