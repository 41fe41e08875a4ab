#include "msr/infotheory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "msr/errors.hpp"

namespace msr::info {

namespace {

void check_alphabet(int n, int cap, const char* name) {
  if (n < 1 || n > cap)
    throw ParameterError(std::string("alphabet size of ") + name + " must be in [1, " +
                         std::to_string(cap) + "]");
}

}  // namespace

DiscreteJoint::DiscreteJoint(int nx, int ny, int nm, std::vector<double> prob)
    : nx_(nx), ny_(ny), nm_(nm), prob_(std::move(prob)) {
  check_alphabet(nx, kMaxAlphabet, "X");
  check_alphabet(ny, kMaxAlphabet, "Y");
  check_alphabet(nm, kMaxAlphabet + 1, "M");
  if (prob_.size() != static_cast<std::size_t>(nx) * ny * nm)
    throw ParameterError("joint table size does not match alphabets");
  double sum = 0.0;
  for (double p : prob_) {
    if (!(p >= 0.0)) throw ParameterError("joint entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("joint entries must sum to 1");
}

int DiscreteJoint::size_of(Var v) const noexcept {
  switch (v) {
    case Var::X: return nx_;
    case Var::Y: return ny_;
    case Var::M: return nm_;
  }
  return 0;
}

GateFunction::GateFunction(int ny, int nm, std::vector<std::uint8_t> accept)
    : ny_(ny), nm_(nm), accept_(std::move(accept)) {
  if (accept_.size() != static_cast<std::size_t>(ny) * nm)
    throw ParameterError("gate table must cover every (y, m) pair");
}

GateFunction GateFunction::constant(int ny, int nm, bool accept) {
  return GateFunction(ny, nm, std::vector<std::uint8_t>(static_cast<std::size_t>(ny) * nm, accept));
}

ModelConditional::ModelConditional(int nx, int ny, int nm, std::vector<double> prob)
    : nx_(nx), ny_(ny), nm_(nm), prob_(std::move(prob)) {
  if (prob_.size() != static_cast<std::size_t>(nx) * ny * nm)
    throw ParameterError("conditional table size does not match alphabets");
  for (std::size_t row = 0; row < static_cast<std::size_t>(ny) * nm; ++row) {
    double s = 0.0;
    for (int x = 0; x < nx; ++x) {
      const double p = prob_[row * nx + x];
      if (!(p >= 0.0)) throw ParameterError("conditional entries must be non-negative");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ParameterError("conditional rows must sum to 1");
  }
}

ModelConditional ModelConditional::uniform(int nx, int ny, int nm) {
  return ModelConditional(nx, ny, nm,
                          std::vector<double>(static_cast<std::size_t>(nx) * ny * nm, 1.0 / nx));
}

ModelConditional ModelConditional::from_joint(const DiscreteJoint& q) {
  const int nx = q.nx(), ny = q.ny(), nm = q.nm();
  std::vector<double> p(static_cast<std::size_t>(nx) * ny * nm);
  for (int y = 0; y < ny; ++y)
    for (int m = 0; m < nm; ++m) {
      double marg = 0.0;
      for (int x = 0; x < nx; ++x) marg += q(x, y, m);
      const std::size_t row = (static_cast<std::size_t>(y) * nm + m) * nx;
      for (int x = 0; x < nx; ++x) p[row + x] = marg > 0.0 ? q(x, y, m) / marg : 1.0 / nx;
    }
  return ModelConditional(nx, ny, nm, std::move(p));
}

double cond_entropy(const DiscreteJoint& q, Var target, std::initializer_list<Var> given) {
  // Flatten the conditioning variables into one index s, then accumulate
  // q(t, s) and q(s) before summing -q(t,s) log2 q(t|s).
  std::array<bool, 3> in_given{};
  for (Var v : given) {
    if (v == target) throw ParameterError("target variable cannot also be conditioned on");
    in_given[static_cast<int>(v)] = true;
  }
  std::array<int, 3> dims = {q.nx(), q.ny(), q.nm()};
  int ns = 1;
  for (int v = 0; v < 3; ++v)
    if (in_given[v]) ns *= dims[v];
  const int nt = dims[static_cast<int>(target)];

  std::vector<double> joint(static_cast<std::size_t>(nt) * ns, 0.0);
  std::vector<double> marg(ns, 0.0);
  for (int x = 0; x < q.nx(); ++x)
    for (int y = 0; y < q.ny(); ++y)
      for (int m = 0; m < q.nm(); ++m) {
        const std::array<int, 3> val = {x, y, m};
        int s = 0;
        for (int v = 0; v < 3; ++v)
          if (in_given[v]) s = s * dims[v] + val[v];
        const double p = q(x, y, m);
        joint[static_cast<std::size_t>(val[static_cast<int>(target)]) * ns + s] += p;
        marg[s] += p;
      }

  double h = 0.0;
  for (int t = 0; t < nt; ++t)
    for (int s = 0; s < ns; ++s) {
      const double pts = joint[static_cast<std::size_t>(t) * ns + s];
      if (pts > 0.0 && marg[s] > 0.0) h -= pts * std::log2(pts / marg[s]);
    }
  return h;
}

double entropy(const DiscreteJoint& q, Var v) { return cond_entropy(q, v, {}); }

MutualInfo cond_mutual_info(const DiscreteJoint& q) {
  MutualInfo r{};
  r.via_entropy = cond_entropy(q, Var::X, {Var::Y}) - cond_entropy(q, Var::X, {Var::Y, Var::M});

  // KL route: for each y with q(y) > 0,
  //   q(y) * sum_{x,m} q(x,m|y) log2( q(x,m|y) / (q(x|y) q(m|y)) ).
  double kl = 0.0;
  const int nx = q.nx(), ny = q.ny(), nm = q.nm();
  std::vector<double> qx(nx), qm(nm);
  for (int y = 0; y < ny; ++y) {
    double qy = 0.0;
    std::fill(qx.begin(), qx.end(), 0.0);
    std::fill(qm.begin(), qm.end(), 0.0);
    for (int x = 0; x < nx; ++x)
      for (int m = 0; m < nm; ++m) {
        const double p = q(x, y, m);
        qy += p;
        qx[x] += p;
        qm[m] += p;
      }
    if (qy <= 0.0) continue;
    double d = 0.0;
    for (int x = 0; x < nx; ++x)
      for (int m = 0; m < nm; ++m) {
        const double p = q(x, y, m) / qy;
        if (p > 0.0) d += p * std::log2(p / ((qx[x] / qy) * (qm[m] / qy)));
      }
    kl += qy * d;
  }
  r.via_kl = kl;

  if (std::abs(r.via_entropy - r.via_kl) > kDualFormulaTol)
    throw ConsistencyError("conditional mutual information: entropy and KL routes disagree");
  if (r.via_entropy < -kNonNegTol || r.via_kl < -kNonNegTol)
    throw ConsistencyError("conditional mutual information is negative");
  return r;
}

DiscreteJoint apply_gate(const DiscreteJoint& q, const GateFunction& v) {
  if (v.ny() != q.ny() || v.nm() != q.nm())
    throw ParameterError("gate alphabet does not match joint");
  const int nx = q.nx(), ny = q.ny(), nm = q.nm(), nmt = nm + 1;
  std::vector<double> out(static_cast<std::size_t>(nx) * ny * nmt, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int m = 0; m < nm; ++m) {
        const int mt = v(y, m) ? m : nm;
        out[(static_cast<std::size_t>(x) * ny + y) * nmt + mt] += q(x, y, m);
      }
  return DiscreteJoint(nx, ny, nmt, std::move(out));
}

NllGap nll_gap(const DiscreteJoint& q, const ModelConditional& p) {
  if (p.nx() != q.nx() || p.ny() != q.ny() || p.nm() != q.nm())
    throw ParameterError("model conditional alphabet does not match joint");
  NllGap r{};
  r.entropy = cond_entropy(q, Var::X, {Var::Y, Var::M});

  double nll = 0.0, kl = 0.0;
  bool infinite = false;
  for (int y = 0; y < q.ny(); ++y)
    for (int m = 0; m < q.nm(); ++m) {
      double qym = 0.0;
      for (int x = 0; x < q.nx(); ++x) qym += q(x, y, m);
      if (qym <= 0.0) continue;
      double d = 0.0;
      for (int x = 0; x < q.nx(); ++x) {
        const double qxyz = q(x, y, m);
        if (qxyz <= 0.0) continue;
        const double px = p(x, y, m);
        if (px <= 0.0) {
          infinite = true;
          continue;
        }
        nll -= qxyz * std::log2(px);
        const double qc = qxyz / qym;
        d += qc * std::log2(qc / px);
      }
      kl += qym * d;
    }
  if (infinite) {
    r.nll = kInfiniteNll;
    r.kl = kInfiniteNll;
    return r;
  }
  r.nll = nll;
  r.kl = kl;
  if (std::abs(r.nll - (r.entropy + r.kl)) > kDualFormulaTol)
    throw ConsistencyError("NLL decomposition does not close");
  return r;
}

EntropyBound metadata_entropy_bound(const DiscreteJoint& q) {
  return {cond_mutual_info(q).value(), entropy(q, Var::M)};
}

}  // namespace msr::info
