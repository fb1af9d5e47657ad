// SPDX-License-Identifier: Apache-2.0

// Outer approximation at one branch-and-bound node. The master LP is
//
//   min  z + t  (penalty form)  or  min z  (budget form)
//   s.t. gradient cuts    z >= L(b) + grad L(b)'(beta - b)
//        diagram cuts     valid for conv(Sol(D)) over (beta_S, t) or beta_S
//        beta in box, z >= loss lower bound, t in [t_lo, t_hi].

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ddconvex/dd.hpp"
#include "ddconvex/hull.hpp"
#include "ddconvex/problem.hpp"

namespace ddconvex {

/// Supporting hyperplane of the loss at `at`, written as grad'beta - z <= grad'at - L(at).
/// coeffs has problem dim entries, t_coeff = -1 multiplies z.
Cut gradient_cut(const ConvexLoss& loss, std::span<const double> at);

struct DiagramConfig {
  int width = 1000;
  int sub_intervals = 64;
  int t_parts = 32;
  int buckets = 0;
};

/// Diagram for the penalized coordinates of `problem` over `box` (full dimension):
/// an epigraph diagram in penalty form, a budget diagram in budget form. Returns
/// nullopt when the problem has no penalized coordinates.
std::optional<Diagram> build_node_diagram(const ScaleProblem& problem, const Box& box, const DiagramConfig& config);

enum class OaStatus { kCutExhausted, kFeasible, kInfeasible, kIterationLimit, kNumericalFailure };

std::string to_string(OaStatus status);

struct OaConfig {
  int max_iters = 100;
  double tol = 1e-6;
  /// Use the exact separation LP instead of the subgradient separator.
  bool exact_separation = false;
  /// After a diagram separation fails, add only loss cuts until z catches up with the
  /// loss, then separate again.
  bool defer_separation = true;
  SubgradientOptions subgradient = [] {
    SubgradientOptions s;
    s.early_exit_violation = 1e-6;
    return s;
  }();
};

/// A cut in master space: coeffs over beta, t_coeff on z for objective-gradient
/// cuts and on t for diagram cuts.
using MasterCut = Cut;

struct NodeResult {
  OaStatus status = OaStatus::kNumericalFailure;
  double dual_bound = 0.0;
  std::vector<double> beta;
  double z = 0.0;
  double t = 0.0;
  int iterations = 0;
  /// Cuts binding at the final master solution (all cuts after a numerical failure).
  std::vector<MasterCut> active_cuts;
  /// Cuts added at this node, indexed by CutOrigin.
  std::array<int, 3> cuts_added{};
  std::vector<double> bound_trace;
};

/// Runs the OA loop on `box`. `diagram` must be what build_node_diagram returns for
/// the same box. The reported bound never drops below `start_bound`.
NodeResult run_node(const ScaleProblem& problem, const Box& box, const std::optional<Diagram>& diagram,
                    const std::vector<MasterCut>& inherited, double start_bound, const OaConfig& config = {});

}  // namespace ddconvex
