// SPDX-License-Identifier: Apache-2.0

// Spatial branch-and-cut over boxes of the regression coefficients. Each node
// rebuilds its diagram on the node box and runs the OA loop; nodes are selected by
// best dual bound.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddconvex/dd.hpp"
#include "ddconvex/oa.hpp"
#include "ddconvex/problem.hpp"

namespace ddconvex {

struct SbcConfig {
  DiagramConfig diagram;
  OaConfig oa;
  double gap = 0.05;
  /// Absolute bound difference treated as a closed gap.
  double abs_gap = 1e-9;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = 100'000;
  /// Forces serial node processing.
  bool deterministic = false;
  int threads = 1;
  std::uint64_t seed = 0;
  double kappa = 10.0;
  double ridge = 1e-3;
  /// Explicit root box; infinite endpoints trigger bound tightening.
  std::optional<Box> box;
  bool record_log = false;
  /// Shrink every node box to the least-squares level set that can still improve on
  /// the incumbent.
  bool tighten = true;
  /// Improve every incumbent candidate with polish() before comparing it.
  bool polish = false;

  /// Width 10000 and 2500 sub-intervals per variable.
  static SbcConfig full_profile();
};

enum class SbcStatus { kGapReached, kTreeExhausted, kNodeLimit, kTimeLimit, kInfeasible };

std::string to_string(SbcStatus status);

struct NodeEvent {
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
  double bound_in = 0.0;
  /// First master objective at the node (before the parent bound is applied).
  double first_master = std::numeric_limits<double>::quiet_NaN();
  double bound_out = 0.0;
  OaStatus status = OaStatus::kNumericalFailure;
  int branch_coord = -1;
  double branch_at = 0.0;
};

struct SolveReport {
  SbcStatus status = SbcStatus::kInfeasible;
  double primal_bound = std::numeric_limits<double>::infinity();
  double dual_bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> beta;
  std::int64_t nodes = 0;
  std::array<std::int64_t, 3> cuts{};  // by CutOrigin
  double time_s = 0.0;
  int max_depth = 0;
  int p = 0;
  Box root_box;
  std::vector<NodeEvent> log;
};

/// (primal - dual) / |dual|; 0 when the bounds agree to `abs_gap`, +inf when dual <= 0
/// and they do not.
double relative_gap(double primal, double dual, double abs_gap = 1e-9);

/// Root box [-B_i, B_i], B_i = kappa (|ridge_i| + ||y|| / ||X_i||), or the configured
/// box with infinite endpoints tightened by the least-squares level set of the
/// incumbent at beta = 0. Needs a LeastSquaresLoss unless the configured box is finite.
Box initial_box(const ScaleProblem& problem, const SbcConfig& config);

/// Coordinate and split value for a node with solution beta. Only `candidates` with
/// positive width are considered; returns nullopt if none qualifies.
std::optional<std::pair<int, double>> branch_choice(const Box& box, std::span<const double> beta,
                                                    std::span<const int> candidates);

/// Children of `box` for the branch choice above.
std::optional<std::pair<Box, Box>> branch(const Box& box, std::span<const double> beta,
                                          std::span<const int> candidates);

/// Objective at beta. In budget form an infeasible beta is first repaired by zeroing
/// its smallest penalized entries until the budget holds.
double primal_from_point(const ScaleProblem& problem, std::span<const double> beta,
                         std::vector<double>* repaired = nullptr);

/// Local improvement of a feasible point inside `box` for least-squares losses:
/// exact coordinate minimisation in penalty form, a least-squares refit on the
/// support in budget form. Returns beta unchanged for other losses.
std::vector<double> polish(const ScaleProblem& problem, std::span<const double> beta, const Box& box);

SolveReport solve(const ScaleProblem& problem, const SbcConfig& config = {});

}  // namespace ddconvex
