// SPDX-License-Identifier: Apache-2.0

// Problems of the form  min loss(beta) + eta(beta_S)   (penalty form)
// or                    min loss(beta)  s.t. eta(beta_S) <= budget   (budget form),
// where S is the set of penalized coordinates.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ddconvex/scale.hpp"

namespace ddconvex {

class ConvexLoss {
 public:
  virtual ~ConvexLoss() = default;
  virtual int dim() const = 0;
  virtual double value(std::span<const double> beta) const = 0;
  virtual void gradient(std::span<const double> beta, std::span<double> out) const = 0;
  /// A constant that no value() falls below.
  virtual double lower_bound() const { return 0.0; }
};

/// ||y - X beta||^2.
class LeastSquaresLoss final : public ConvexLoss {
 public:
  LeastSquaresLoss(Eigen::MatrixXd x, Eigen::VectorXd y);

  int dim() const override { return static_cast<int>(x_.cols()); }
  double value(std::span<const double> beta) const override;
  void gradient(std::span<const double> beta, std::span<double> out) const override;

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

enum class PenaltyForm { kObjective, kBudget };

struct ScaleProblem {
  std::shared_ptr<const ConvexLoss> loss;
  /// One component per entry of `penalized`.
  SeparableScale penalty;
  /// Coordinates of beta that carry a penalty component, increasing.
  std::vector<int> penalized;
  PenaltyForm form = PenaltyForm::kObjective;
  double budget = 0.0;

  int dim() const { return loss ? loss->dim() : 0; }
  std::vector<double> restrict(std::span<const double> beta) const;
  double penalty_value(std::span<const double> beta) const;
  /// loss + penalty (penalty form) or loss (budget form).
  double objective(std::span<const double> beta) const;
  /// Budget form: eta(beta_S) <= budget + tol. Always true in penalty form.
  bool feasible(std::span<const double> beta, double tol = 0.0) const;

  /// Throws on inconsistent sizes or unsorted / out-of-range indices.
  void validate() const;
};

/// Every coordinate penalized by `penalty`.
ScaleProblem make_problem(std::shared_ptr<const ConvexLoss> loss, SeparableScale penalty,
                          PenaltyForm form = PenaltyForm::kObjective, double budget = 0.0);

}  // namespace ddconvex
