#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace msr::info {

// Alphabet cap for X, Y and M. The gated metadata variable adds one symbol
// for the fallback value, so M may reach kMaxAlphabet + 1 after apply_gate.
inline constexpr int kMaxAlphabet = 16;

inline constexpr double kInfiniteNll = std::numeric_limits<double>::infinity();

enum class Var { X = 0, Y = 1, M = 2 };

// Explicit joint table q(x, y, m), indexed (x * ny + y) * nm + m.
class DiscreteJoint {
 public:
  DiscreteJoint(int nx, int ny, int nm, std::vector<double> prob);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nm() const noexcept { return nm_; }
  double operator()(int x, int y, int m) const { return prob_[index(x, y, m)]; }
  const std::vector<double>& table() const noexcept { return prob_; }

  int size_of(Var v) const noexcept;

 private:
  std::size_t index(int x, int y, int m) const noexcept {
    return (static_cast<std::size_t>(x) * ny_ + y) * nm_ + m;
  }

  int nx_, ny_, nm_;
  std::vector<double> prob_;
};

// Total gate v(y, m) in {0, 1}, indexed y * nm + m.
class GateFunction {
 public:
  GateFunction(int ny, int nm, std::vector<std::uint8_t> accept);
  static GateFunction constant(int ny, int nm, bool accept);

  int ny() const noexcept { return ny_; }
  int nm() const noexcept { return nm_; }
  bool operator()(int y, int m) const { return accept_[static_cast<std::size_t>(y) * nm_ + m] != 0; }

 private:
  int ny_, nm_;
  std::vector<std::uint8_t> accept_;
};

// Model conditional p(x | y, m), indexed (y * nm + m) * nx + x.
class ModelConditional {
 public:
  ModelConditional(int nx, int ny, int nm, std::vector<double> prob);
  static ModelConditional uniform(int nx, int ny, int nm);
  // The exact conditional q(x | y, m); rows with zero mass become uniform.
  static ModelConditional from_joint(const DiscreteJoint& q);

  double operator()(int x, int y, int m) const {
    return prob_[(static_cast<std::size_t>(y) * nm_ + m) * nx_ + x];
  }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nm() const noexcept { return nm_; }

 private:
  int nx_, ny_, nm_;
  std::vector<double> prob_;
};

// H(target | given) in bits, with 0 log 0 = 0 and zero-mass conditioning
// values skipped.
double cond_entropy(const DiscreteJoint& q, Var target, std::initializer_list<Var> given);
double entropy(const DiscreteJoint& q, Var v);

struct MutualInfo {
  double via_entropy;  // H(X|Y) - H(X|Y,M)
  double via_kl;       // E_Y[ KL(q(X,M|Y) || q(X|Y) q(M|Y)) ]
  double value() const noexcept { return via_entropy; }
};

inline constexpr double kDualFormulaTol = 1e-10;
inline constexpr double kNonNegTol = 1e-12;

// I(X; M | Y) by both routes. Throws ConsistencyError if they disagree by more
// than kDualFormulaTol or the value is below -kNonNegTol.
MutualInfo cond_mutual_info(const DiscreteJoint& q);

// Joint over (X, Y, M~) where M~ = M if v(y, m) = 1 else the fallback symbol,
// which takes index nm (the last one).
DiscreteJoint apply_gate(const DiscreteJoint& q, const GateFunction& v);

struct NllGap {
  double nll;      // E_q[-log2 p(X | Y, M)]
  double entropy;  // H(X | Y, M)
  double kl;       // E_{Y,M}[ KL(q(.|Y,M) || p(.|Y,M)) ]
};

// nll == entropy + kl within kDualFormulaTol (ConsistencyError otherwise).
// nll and kl are kInfiniteNll when p puts zero mass where q does not.
NllGap nll_gap(const DiscreteJoint& q, const ModelConditional& p);

struct EntropyBound {
  double i_xmy;
  double h_m;
};

EntropyBound metadata_entropy_bound(const DiscreteJoint& q);

}  // namespace msr::info
