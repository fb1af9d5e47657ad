// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/oa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddconvex/error.hpp"
#include "ddconvex/lp.hpp"

namespace ddconvex {

Cut gradient_cut(const ConvexLoss& loss, std::span<const double> at) {
  Cut cut;
  cut.origin = CutOrigin::kObjectiveGradient;
  cut.coeffs.assign(at.size(), 0.0);
  loss.gradient(at, cut.coeffs);
  cut.t_coeff = -1.0;
  cut.rhs = std::inner_product(cut.coeffs.begin(), cut.coeffs.end(), at.begin(), 0.0) - loss.value(at);
  return cut;
}

namespace {

Box restricted_box(const ScaleProblem& problem, const Box& box) {
  std::vector<Interval> iv;
  iv.reserve(problem.penalized.size());
  for (int i : problem.penalized) iv.push_back(box[i]);
  return Box(std::move(iv));
}

}  // namespace

std::optional<Diagram> build_node_diagram(const ScaleProblem& problem, const Box& box, const DiagramConfig& config) {
  if (problem.penalized.empty()) return std::nullopt;
  if (box.size() != problem.dim()) throw DimensionError("box size differs from problem dim");
  const Box sub = restricted_box(problem, box);
  if (!sub.finite()) throw IntervalError("node diagrams need a finite box");
  const auto parts = PartitionScheme::uniform(sub, config.sub_intervals, true);
  BuildOptions opts;
  opts.width_limit = config.width;
  opts.buckets = config.buckets;
  if (problem.form == PenaltyForm::kBudget) return build(problem.penalty, sub, parts, problem.budget, opts);
  double t_lo = 0.0;
  double t_hi = 0.0;
  for (int k = 0; k < sub.size(); ++k) {
    t_lo += interval_lower_bound(problem.penalty[k], sub[k].lo, sub[k].hi);
    t_hi += interval_upper_bound(problem.penalty[k], sub[k].lo, sub[k].hi);
  }
  return build_epigraph(problem.penalty, sub, parts, t_lo, t_hi, config.t_parts, opts);
}

std::string to_string(OaStatus status) {
  switch (status) {
    case OaStatus::kCutExhausted:
      return "cut-exhausted";
    case OaStatus::kFeasible:
      return "feasible";
    case OaStatus::kInfeasible:
      return "infeasible";
    case OaStatus::kIterationLimit:
      return "iteration-limit";
    case OaStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

// Column layout: beta (p), z, then t in penalty form.
class Master {
 public:
  Master(const ScaleProblem& problem, const Box& box, const std::optional<Diagram>& diagram)
      : p_(problem.dim()), has_t_(diagram && diagram->is_epigraph()) {
    lp::LpProblem prob(lp::Sense::kMinimize);
    for (int i = 0; i < p_; ++i) prob.add_variable(box[i].lo, box[i].hi, 0.0);
    prob.add_variable(problem.loss->lower_bound(), lp::kInfinity, 1.0);
    if (has_t_) {
      double lo = lp::kInfinity;
      double hi = -lp::kInfinity;
      const auto& d = *diagram;
      for (ArcId a : d.layer_arcs(d.dims() - 1)) {
        lo = std::min(lo, d.arc(a).label);
        hi = std::max(hi, d.arc(a).label);
      }
      prob.add_variable(lo, hi, 1.0);
    }
    solver_.emplace(std::move(prob));
  }

  void add(const MasterCut& cut) {
    std::vector<double> row(cut.coeffs.begin(), cut.coeffs.end());
    row.resize(p_ + (has_t_ ? 2 : 1), 0.0);
    if (cut.origin == CutOrigin::kObjectiveGradient) {
      row[p_] = cut.t_coeff;
    } else if (has_t_) {
      row[p_ + 1] = cut.t_coeff;
    }
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    double rhs = cut.rhs;
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
      rhs /= norm;
    }
    solver_->add_row(std::move(row), lp::Relation::kLessEqual, rhs);
    cuts_.push_back(cut);
  }

  lp::LpOutcome solve() { return solver_->solve(); }
  bool has_t() const { return has_t_; }
  int p() const { return p_; }
  const std::vector<MasterCut>& cuts() const { return cuts_; }

  std::vector<MasterCut> active(const lp::LpOutcome& out) const {
    std::vector<MasterCut> keep;
    const auto& prob = solver_->problem();
    for (std::size_t r = 0; r < cuts_.size(); ++r) {
      const auto& row = prob.row(static_cast<int>(r));
      double lhs = 0.0;
      for (std::size_t j = 0; j < row.coeffs.size(); ++j) lhs += row.coeffs[j] * out.x[j];
      const double slack = row.rhs - lhs;
      const bool dual_nonzero = r < out.row_duals.size() && std::abs(out.row_duals[r]) > 1e-12;
      if (slack <= 1e-7 * (1.0 + std::abs(row.rhs)) || dual_nonzero) keep.push_back(cuts_[r]);
    }
    return keep;
  }

 private:
  int p_;
  bool has_t_;
  std::optional<lp::SimplexSolver> solver_;
  std::vector<MasterCut> cuts_;
};

MasterCut lift(const ScaleProblem& problem, const Cut& dd_cut) {
  MasterCut cut;
  cut.origin = dd_cut.origin;
  cut.coeffs.assign(problem.dim(), 0.0);
  for (std::size_t k = 0; k < problem.penalized.size(); ++k) cut.coeffs[problem.penalized[k]] = dd_cut.coeffs[k];
  cut.t_coeff = dd_cut.t_coeff;
  cut.rhs = dd_cut.rhs;
  return cut;
}

}  // namespace

NodeResult run_node(const ScaleProblem& problem, const Box& box, const std::optional<Diagram>& diagram,
                    const std::vector<MasterCut>& inherited, double start_bound, const OaConfig& config) {
  if (box.size() != problem.dim()) throw DimensionError("box size differs from problem dim");
  if (!box.finite()) throw IntervalError("OA needs a finite node box");
  NodeResult result;
  result.dual_bound = start_bound;
  if (diagram && !diagram->has_path()) {
    result.status = OaStatus::kInfeasible;
    return result;
  }
  const bool budget_form = problem.form == PenaltyForm::kBudget;
  Master master(problem, box, diagram);
  for (const auto& cut : inherited) master.add(cut);

  const int p = problem.dim();
  std::vector<double> point;
  lp::LpOutcome out;
  // Set after a diagram separation finds nothing; cleared once the loss cuts settle.
  bool dd_idle = false;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    result.iterations = iter + 1;
    out = master.solve();
    if (out.status == lp::Status::kInfeasible) {
      result.status = OaStatus::kInfeasible;
      return result;
    }
    if (out.status != lp::Status::kOptimal) {
      result.status = OaStatus::kNumericalFailure;
      result.active_cuts = master.cuts();
      return result;
    }
    result.bound_trace.push_back(out.objective);
    result.dual_bound = std::max(result.dual_bound, out.objective);
    result.beta.assign(out.x.begin(), out.x.begin() + p);
    result.z = out.x[p];
    result.t = master.has_t() ? out.x[p + 1] : 0.0;

    const double loss = problem.loss->value(result.beta);
    const bool loss_ok = result.z >= loss - config.tol;
    bool penalty_ok = true;
    if (diagram) {
      const double eta = problem.penalty_value(result.beta);
      penalty_ok = budget_form ? eta <= problem.budget + config.tol : result.t >= eta - config.tol;
    }
    if (loss_ok && penalty_ok) {
      result.status = OaStatus::kFeasible;
      result.active_cuts = master.active(out);
      return result;
    }

    bool added = false;
    if (loss_ok) dd_idle = false;
    if (!loss_ok) {
      master.add(gradient_cut(*problem.loss, result.beta));
      ++result.cuts_added[static_cast<int>(CutOrigin::kObjectiveGradient)];
      added = true;
    }
    if (diagram && !penalty_ok && !dd_idle) {
      point = problem.restrict(result.beta);
      if (diagram->is_epigraph()) point.push_back(result.t);
      std::optional<Cut> cut;
      if (config.exact_separation) {
        try {
          cut = separate_exact(*diagram, point).cut;
        } catch (const SeparationError&) {
          result.status = OaStatus::kNumericalFailure;
          result.active_cuts = master.cuts();
          return result;
        }
      } else {
        cut = separate_subgradient(*diagram, point, config.subgradient).cut;
      }
      if (cut && cut->violation(std::span<const double>(point).first(cut->coeffs.size()),
                                diagram->is_epigraph() ? point.back() : 0.0) > config.tol) {
        master.add(lift(problem, *cut));
        ++result.cuts_added[static_cast<int>(cut->origin)];
        added = true;
      } else {
        dd_idle = config.defer_separation;
      }
    }
    if (!added) {
      result.status = OaStatus::kCutExhausted;
      result.active_cuts = master.active(out);
      return result;
    }
  }
  // Bound of the final cut set.
  out = master.solve();
  if (out.status == lp::Status::kOptimal) {
    result.bound_trace.push_back(out.objective);
    result.dual_bound = std::max(result.dual_bound, out.objective);
    result.beta.assign(out.x.begin(), out.x.begin() + p);
    result.z = out.x[p];
    result.t = master.has_t() ? out.x[p + 1] : 0.0;
    result.active_cuts = master.active(out);
    result.status = OaStatus::kIterationLimit;
  } else if (out.status == lp::Status::kInfeasible) {
    result.status = OaStatus::kInfeasible;
  } else {
    result.status = OaStatus::kNumericalFailure;
    result.active_cuts = master.cuts();
  }
  return result;
}

}  // namespace ddconvex
