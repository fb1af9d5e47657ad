// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/problem.hpp"

#include <numeric>

#include "ddconvex/error.hpp"

namespace ddconvex {

LeastSquaresLoss::LeastSquaresLoss(Eigen::MatrixXd x, Eigen::VectorXd y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) throw DimensionError("X rows and y length differ");
}

double LeastSquaresLoss::value(std::span<const double> beta) const {
  if (static_cast<Eigen::Index>(beta.size()) != x_.cols()) throw DimensionError("beta size differs from X columns");
  const Eigen::Map<const Eigen::VectorXd> b(beta.data(), x_.cols());
  return (y_ - x_ * b).squaredNorm();
}

void LeastSquaresLoss::gradient(std::span<const double> beta, std::span<double> out) const {
  if (static_cast<Eigen::Index>(beta.size()) != x_.cols() || out.size() != beta.size()) {
    throw DimensionError("beta or gradient size differs from X columns");
  }
  const Eigen::Map<const Eigen::VectorXd> b(beta.data(), x_.cols());
  Eigen::Map<Eigen::VectorXd> g(out.data(), x_.cols());
  g.noalias() = 2.0 * x_.transpose() * (x_ * b - y_);
}

std::vector<double> ScaleProblem::restrict(std::span<const double> beta) const {
  if (static_cast<int>(beta.size()) != dim()) throw DimensionError("beta size differs from problem dim");
  std::vector<double> out;
  out.reserve(penalized.size());
  for (int i : penalized) out.push_back(beta[i]);
  return out;
}

double ScaleProblem::penalty_value(std::span<const double> beta) const {
  const auto sub = restrict(beta);
  return penalty.eval(sub);
}

double ScaleProblem::objective(std::span<const double> beta) const {
  const double l = loss->value(beta);
  return form == PenaltyForm::kObjective ? l + penalty_value(beta) : l;
}

bool ScaleProblem::feasible(std::span<const double> beta, double tol) const {
  if (form == PenaltyForm::kObjective) return true;
  return penalty_value(beta) <= budget + tol;
}

void ScaleProblem::validate() const {
  if (!loss) throw ParameterError("problem has no loss");
  if (dim() < 1) throw DimensionError("problem dimension must be positive");
  if (static_cast<int>(penalized.size()) != penalty.size()) {
    throw DimensionError("penalty size differs from the number of penalized coordinates");
  }
  for (std::size_t k = 0; k < penalized.size(); ++k) {
    if (penalized[k] < 0 || penalized[k] >= dim()) throw DimensionError("penalized index out of range");
    if (k > 0 && penalized[k] <= penalized[k - 1]) throw ParameterError("penalized indices must increase");
  }
  if (form == PenaltyForm::kBudget && !(budget >= 0.0)) throw ParameterError("budget must be non-negative");
}

ScaleProblem make_problem(std::shared_ptr<const ConvexLoss> loss, SeparableScale penalty, PenaltyForm form,
                          double budget) {
  ScaleProblem p;
  p.loss = std::move(loss);
  p.penalized.resize(penalty.size());
  std::iota(p.penalized.begin(), p.penalized.end(), 0);
  p.penalty = std::move(penalty);
  p.form = form;
  p.budget = budget;
  p.validate();
  return p;
}

}  // namespace ddconvex
