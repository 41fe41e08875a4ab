#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msr/infotheory.hpp"

namespace msr::info {

struct TheoremSweepConfig {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int max_x = 4;
  int max_y = 4;
  int max_m = 4;
};

// Worst observed values across the sweep. Slack values are "right-hand side
// minus left-hand side" of each inequality, so non-negative means it holds.
struct TheoremReport {
  std::uint64_t joints = 0;           // random + hand-built joints evaluated
  std::uint64_t gated_pairs = 0;      // (joint, gate) pairs evaluated
  std::uint64_t nll_pairs = 0;        // (joint, model) pairs evaluated
  double min_entropy_slack = 0.0;     // H(X|Y) - H(X|Y,M)
  double min_mutual_info = 0.0;       // I(X;M|Y)
  double max_dual_gap = 0.0;          // |entropy route - KL route|
  double min_gated_slack = 0.0;       // H(X|Y) - H(X|Y,M~)
  double max_nll_gap = 0.0;           // |nll - (H + KL)|
  double max_exact_model_kl = 0.0;    // KL when p is the true conditional
  double min_bound_slack = 0.0;       // H(M) - I(X;M|Y)
  double tight_case_gap = 0.0;        // |I - H(M)| for X = M, Y constant
  std::vector<std::string> failures;  // first few violations, human readable

  bool passed() const noexcept { return failures.empty(); }
};

// Sweep random Dirichlet joints (mixed concentrations, random sparsity)
// plus hand-built degenerate joints through every inequality.
TheoremReport verify_theorem(const TheoremSweepConfig& cfg);

// The hand-built cases on their own (point masses, X = M, constant M,
// independent M, X = Y).
std::vector<DiscreteJoint> degenerate_joints();

}  // namespace msr::info
