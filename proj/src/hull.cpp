// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddconvex/error.hpp"

namespace ddconvex {

std::string to_string(CutOrigin origin) {
  switch (origin) {
    case CutOrigin::kExactLp:
      return "exact-lp";
    case CutOrigin::kSubgradient:
      return "subgradient";
    case CutOrigin::kObjectiveGradient:
      return "objective-gradient";
  }
  return "unknown";
}

double Cut::lhs(std::span<const double> x, double t) const {
  if (x.size() != coeffs.size()) throw DimensionError("cut and point dimensions differ");
  return std::inner_product(coeffs.begin(), coeffs.end(), x.begin(), 0.0) + t_coeff * t;
}

void Cut::normalize() {
  double sq = t_coeff * t_coeff;
  for (double c : coeffs) sq += c * c;
  const double norm = std::sqrt(sq);
  if (norm == 0.0) return;
  for (double& c : coeffs) c /= norm;
  t_coeff /= norm;
  rhs /= norm;
}

Cut make_cut(const Diagram& d, std::span<const double> raw, double rhs, CutOrigin origin) {
  if (static_cast<int>(raw.size()) != d.dims()) throw DimensionError("raw cut size differs from diagram dims");
  Cut cut;
  cut.origin = origin;
  cut.rhs = rhs;
  if (d.is_epigraph()) {
    cut.coeffs.assign(raw.begin(), raw.end() - 1);
    cut.t_coeff = raw.back();
  } else {
    cut.coeffs.assign(raw.begin(), raw.end());
  }
  return cut;
}

lp::LpProblem flow_lp(const Diagram& d, std::span<const double> point) {
  if (!point.empty() && static_cast<int>(point.size()) != d.dims()) {
    throw DimensionError("point size differs from diagram dims");
  }
  lp::LpProblem prob(lp::Sense::kMinimize);
  const std::size_t na = d.num_arcs();
  for (std::size_t a = 0; a < na; ++a) prob.add_variable(0.0, lp::kInfinity, 0.0);
  for (std::size_t u = 0; u < d.num_nodes(); ++u) {
    const NodeId id{static_cast<std::int32_t>(u)};
    std::vector<double> row(na, 0.0);
    for (ArcId a : d.out_arcs(id)) row[a.index()] += 1.0;
    for (ArcId a : d.in_arcs(id)) row[a.index()] -= 1.0;
    const double supply = id == d.root() ? 1.0 : id == d.terminal() ? -1.0 : 0.0;
    prob.add_row(std::move(row), lp::Relation::kEqual, supply);
  }
  for (int k = 0; k < d.dims(); ++k) {
    std::vector<double> row(na, 0.0);
    for (ArcId a : d.layer_arcs(k)) row[a.index()] = d.arc(a).label;
    prob.add_row(std::move(row), lp::Relation::kEqual, point.empty() ? 0.0 : point[k]);
  }
  return prob;
}

Membership membership(const Diagram& d, std::span<const double> point, double tol) {
  if (!d.has_path()) throw NoPathError("membership query on an empty diagram");
  if (static_cast<int>(point.size()) != d.dims()) throw DimensionError("point size differs from diagram dims");
  if (!d.finite_labels()) throw IntervalError("diagram has a non-finite arc label");
  const auto prob = flow_lp(d, point);
  const auto out = lp::solve(prob);
  switch (out.status) {
    case lp::Status::kOptimal:
      return lp::max_primal_violation(prob, out.x) <= tol ? Membership::kInside : Membership::kOutside;
    case lp::Status::kInfeasible:
      return Membership::kOutside;
    default:
      throw SeparationError("flow LP ended with status " + lp::to_string(out.status));
  }
}

ExactSeparation separate_exact(const Diagram& d, std::span<const double> point) {
  if (!d.has_path()) throw NoPathError("separation on an empty diagram");
  const int dims = d.dims();
  if (static_cast<int>(point.size()) != dims) throw DimensionError("point size differs from diagram dims");
  if (!d.finite_labels()) throw IntervalError("diagram has a non-finite arc label");

  // min sum_k |point_k - sum_{a in k} label(a) y_a| over unit flows; the duals of the
  // linking rows are an optimal g.
  const std::size_t na = d.num_arcs();
  const std::size_t cols = na + 2 * static_cast<std::size_t>(dims);
  lp::LpProblem full(lp::Sense::kMinimize);
  for (std::size_t a = 0; a < na; ++a) full.add_variable(0.0, lp::kInfinity, 0.0);
  for (int j = 0; j < 2 * dims; ++j) full.add_variable(0.0, lp::kInfinity, 1.0);
  for (std::size_t u = 0; u < d.num_nodes(); ++u) {
    const NodeId id{static_cast<std::int32_t>(u)};
    std::vector<double> row(cols, 0.0);
    for (ArcId a : d.out_arcs(id)) row[a.index()] += 1.0;
    for (ArcId a : d.in_arcs(id)) row[a.index()] -= 1.0;
    const double supply = id == d.root() ? 1.0 : id == d.terminal() ? -1.0 : 0.0;
    full.add_row(std::move(row), lp::Relation::kEqual, supply);
  }
  const int link0 = full.num_rows();
  for (int k = 0; k < dims; ++k) {
    std::vector<double> row(cols, 0.0);
    for (ArcId a : d.layer_arcs(k)) row[a.index()] = d.arc(a).label;
    row[na + 2 * k] = 1.0;
    row[na + 2 * k + 1] = -1.0;
    full.add_row(std::move(row), lp::Relation::kEqual, point[k]);
  }
  const auto out = lp::solve(full);
  if (out.status != lp::Status::kOptimal) {
    throw SeparationError("separation LP ended with status " + lp::to_string(out.status));
  }
  ExactSeparation result;
  result.omega = std::max(0.0, out.objective);
  if (out.objective <= 1e-7) return result;
  std::vector<double> g(dims);
  for (int k = 0; k < dims; ++k) g[k] = std::clamp(out.row_duals[link0 + k], -1.0, 1.0);
  const double rhs = longest_path_linear(d, g).value;
  if (std::inner_product(g.begin(), g.end(), point.begin(), 0.0) - rhs <= 0.0) return result;
  result.inside = false;
  Cut cut = make_cut(d, g, rhs, CutOrigin::kExactLp);
  cut.normalize();
  result.cut = std::move(cut);
  return result;
}

double StepRule::operator()(int tau) const {
  switch (kind) {
    case Kind::kInverseSqrt:
      return scale / std::sqrt(tau + 1.0);
    case Kind::kInverse:
      return scale / (tau + 1.0);
    case Kind::kConstant:
      return scale;
  }
  return scale;
}

SubgradientResult separate_subgradient(const Diagram& d, std::span<const double> point,
                                       const SubgradientOptions& options) {
  if (!d.has_path()) throw NoPathError("separation on an empty diagram");
  const int dims = d.dims();
  if (static_cast<int>(point.size()) != dims) throw DimensionError("point size differs from diagram dims");

  std::vector<double> direction(dims, 0.0);
  if (options.initial_direction) {
    if (static_cast<int>(options.initial_direction->size()) != dims) {
      throw DimensionError("initial direction size differs from diagram dims");
    }
    direction = *options.initial_direction;
  } else {
    for (int k = 0; k < dims; ++k) {
      double lo = kUnbounded;
      double hi = -kUnbounded;
      for (ArcId a : d.layer_arcs(k)) {
        lo = std::min(lo, d.arc(a).label);
        hi = std::max(hi, d.arc(a).label);
      }
      direction[k] = point[k] - 0.5 * (lo + hi);
    }
  }
  auto project = [](std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm > 1.0) {
      for (double& x : v) x /= norm;
    }
    return std::min(norm, 1.0);
  };
  if (!options.initial_direction) {
    double sq = 0.0;
    for (double x : direction) sq += x * x;
    if (sq == 0.0) {
      direction.assign(dims, 0.0);
      direction[0] = 1.0;
    } else {
      const double norm = std::sqrt(sq);
      for (double& x : direction) x /= norm;
    }
  } else {
    project(direction);
  }

  SubgradientResult result;
  double best = 0.0;
  std::vector<double> best_direction;
  std::vector<double> best_point;
  std::vector<double> step(dims);
  for (int tau = 0; tau < options.max_iters; ++tau) {
    const Path path = longest_path_linear(d, direction);
    double v = 0.0;
    for (int k = 0; k < dims; ++k) {
      step[k] = point[k] - path.point[k];
      v += direction[k] * step[k];
    }
    result.iterations = tau + 1;
    if (v > std::max(0.0, best)) {
      best = v;
      best_direction = direction;
      best_point = path.point;
      result.best_iteration = tau;
    }
    if (options.record_trace) result.best_trace.push_back(best);
    if (options.early_exit_violation && best > *options.early_exit_violation) break;
    const double rho = options.step(tau);
    for (int k = 0; k < dims; ++k) direction[k] += rho * step[k];
    const double norm = project(direction);
    if (options.record_trace) result.direction_norms.push_back(norm);
  }
  if (best > 0.0) {
    const double rhs = std::inner_product(best_direction.begin(), best_direction.end(), best_point.begin(), 0.0);
    Cut cut = make_cut(d, best_direction, rhs, CutOrigin::kSubgradient);
    double sq = 0.0;
    for (double x : best_direction) sq += x * x;
    cut.normalize();
    result.best_violation = best / std::sqrt(sq);
    result.cut = std::move(cut);
  }
  return result;
}

}  // namespace ddconvex
