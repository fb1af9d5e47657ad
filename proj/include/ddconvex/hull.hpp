// SPDX-License-Identifier: Apache-2.0

// Convex hull of the points encoded by a diagram: the unit-flow model, an exact
// separation LP and a cheaper projected-subgradient separator driven by longest
// paths.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddconvex/dd.hpp"
#include "ddconvex/lp.hpp"

namespace ddconvex {

enum class CutOrigin { kExactLp, kSubgradient, kObjectiveGradient };

std::string to_string(CutOrigin origin);

/// coeffs'x + t_coeff * t <= rhs. For diagram cuts t is the diagram's epigraph
/// variable; for objective-gradient cuts it is the loss epigraph variable.
struct Cut {
  std::vector<double> coeffs;
  double t_coeff = 0.0;
  double rhs = 0.0;
  CutOrigin origin = CutOrigin::kSubgradient;

  double lhs(std::span<const double> x, double t = 0.0) const;
  /// Positive when (x, t) violates the cut.
  double violation(std::span<const double> x, double t = 0.0) const { return lhs(x, t) - rhs; }
  /// Rescales to unit Euclidean norm of (coeffs, t_coeff).
  void normalize();
};

/// Builds a cut from a raw coefficient vector over the diagram's dims (the last
/// entry becomes t_coeff for epigraph diagrams).
Cut make_cut(const Diagram& d, std::span<const double> raw, double rhs, CutOrigin origin);

/// Unit-flow model: one column y_a >= 0 per arc, one balance row per node (supply 1
/// at the root, -1 at the terminal) followed by one linking row per arc layer,
/// sum_{a in layer k} label(a) y_a = point[k]. An empty `point` leaves zero rhs.
lp::LpProblem flow_lp(const Diagram& d, std::span<const double> point = {});

enum class Membership { kInside, kOutside };

/// Decides point in conv(Sol(d)) by feasibility of the flow model; row residuals of
/// an accepted flow are at most `tol`. Throws NoPathError for empty diagrams.
Membership membership(const Diagram& d, std::span<const double> point, double tol = 1e-7);

struct ExactSeparation {
  bool inside = true;
  double omega = 0.0;  // optimal value of the normalised separation LP
  std::optional<Cut> cut;
};

/// Solves max_{g in [-1,1]^n} g'x̄ - max_{x in Sol(d)} g'x through its dual, the
/// l1 distance from x̄ to the flow polytope. omega <= 1e-7 means inside. The LP is
/// dense in the number of arcs, so this is meant for small diagrams.
ExactSeparation separate_exact(const Diagram& d, std::span<const double> point);

struct StepRule {
  enum class Kind { kInverseSqrt, kInverse, kConstant };
  Kind kind = Kind::kInverseSqrt;
  double scale = 1.0;

  double operator()(int tau) const;
};

struct SubgradientOptions {
  int max_iters = 50;
  StepRule step;
  /// Stop as soon as the best violation exceeds this value.
  std::optional<double> early_exit_violation;
  /// Starting direction; by default x̄ minus the per-layer label midpoints.
  std::optional<std::vector<double>> initial_direction;
  /// Fill direction_norms and best_trace.
  bool record_trace = false;
};

struct SubgradientResult {
  std::optional<Cut> cut;
  double best_violation = 0.0;  // violation of the normalised cut at x̄
  int best_iteration = 0;
  int iterations = 0;
  std::vector<double> direction_norms;  // ||g|| after each projection
  std::vector<double> best_trace;       // best raw violation after each iteration
};

SubgradientResult separate_subgradient(const Diagram& d, std::span<const double> point,
                                       const SubgradientOptions& options = {});

}  // namespace ddconvex
