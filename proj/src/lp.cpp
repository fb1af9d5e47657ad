// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/lp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ddconvex/error.hpp"

namespace ddconvex::lp {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kDegenerateStep = 1e-12;

std::pair<double, double> slack_bounds(Relation relation) {
  switch (relation) {
    case Relation::kLessEqual:
      return {0.0, kInfinity};
    case Relation::kEqual:
      return {0.0, 0.0};
    case Relation::kGreaterEqual:
      return {-kInfinity, 0.0};
  }
  return {0.0, 0.0};
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kUnbounded:
      return "unbounded";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

int LpProblem::add_variable(double lower, double upper, double cost) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInfinity || upper == -kInfinity) {
    throw ParameterError("LP variable bounds must satisfy lower <= upper");
  }
  if (!std::isfinite(cost)) throw ParameterError("LP cost must be finite");
  objective_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  for (auto& row : rows_) {
    row.coeffs.resize(objective_.size(), 0.0);
  }
  return num_vars() - 1;
}

int LpProblem::add_row(std::vector<double> coeffs, Relation relation, double rhs) {
  if (coeffs.size() > objective_.size()) {
    throw DimensionError("LP row has more coefficients than variables");
  }
  for (double v : coeffs) {
    if (!std::isfinite(v)) throw ParameterError("LP row coefficients must be finite");
  }
  if (std::isnan(rhs)) throw ParameterError("LP row rhs must not be NaN");
  coeffs.resize(objective_.size(), 0.0);
  rows_.push_back(Row{std::move(coeffs), relation, rhs});
  return num_rows() - 1;
}

void LpProblem::set_bounds(int var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

void LpProblem::validate() const {
  const auto n = objective_.size();
  if (lower_.size() != n || upper_.size() != n) {
    throw DimensionError("LP bound vectors do not match the variable count");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective_[j])) throw ParameterError("LP objective entry is not finite");
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
        lower_[j] == kInfinity || upper_[j] == -kInfinity) {
      throw ParameterError("LP variable " + std::to_string(j) + " has invalid bounds");
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (row.coeffs.size() != n) throw DimensionError("LP row length mismatch");
    if (!std::isfinite(row.rhs)) throw ParameterError("LP row rhs is not finite");
    for (double a : row.coeffs) {
      if (!std::isfinite(a)) throw ParameterError("LP matrix entry is not finite");
    }
  }
}

SimplexSolver::SimplexSolver(LpProblem problem, SimplexOptions options)
    : problem_(std::move(problem)), options_(options) {}

int SimplexSolver::add_row(std::vector<double> coeffs, Relation relation, double rhs) {
  return problem_.add_row(std::move(coeffs), relation, rhs);
}

int SimplexSolver::add_variable(double lower, double upper, double cost) {
  return problem_.add_variable(lower, upper, cost);
}

double SimplexSolver::nonbasic_value(int j) const {
  switch (status_[j]) {
    case VarStatus::kAtLower:
      return lo_[j];
    case VarStatus::kAtUpper:
      return hi_[j];
    default:
      return 0.0;
  }
}

void SimplexSolver::load() {
  problem_.validate();
  const int old_n = n_;
  const int old_m = m_;
  const bool had_basis = !basis_.empty() || (!status_.empty());

  n_ = problem_.num_vars();
  m_ = problem_.num_rows();
  const int total = n_ + m_;

  a_.resize(m_, n_);
  b_.resize(m_);
  cost_.assign(total, 0.0);
  lo_.resize(total);
  hi_.resize(total);
  const double sign = problem_.sense() == Sense::kMaximize ? -1.0 : 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = sign * problem_.objective()[j];
    lo_[j] = problem_.lower()[j];
    hi_[j] = problem_.upper()[j];
  }
  for (int i = 0; i < m_; ++i) {
    const auto& row = problem_.row(i);
    for (int j = 0; j < n_; ++j) a_(i, j) = row.coeffs[j];
    b_(i) = row.rhs;
    std::tie(lo_[n_ + i], hi_[n_ + i]) = slack_bounds(row.relation);
  }

  if (!had_basis) {
    cold_basis();
    return;
  }

  // Carry the previous basis over; appended rows start with their slack basic.
  std::vector<VarStatus> status(total, VarStatus::kAtLower);
  auto remap = [&](int j) { return j < old_n ? j : j - old_n + n_; };
  for (int j = 0; j < old_n + old_m; ++j) status[remap(j)] = status_[j];
  std::vector<bool> assigned(total, false);
  for (int j = 0; j < old_n + old_m; ++j) assigned[remap(j)] = true;
  std::vector<int> basis(m_);
  for (int i = 0; i < old_m; ++i) basis[i] = remap(basis_[i]);
  for (int i = old_m; i < m_; ++i) {
    basis[i] = n_ + i;
    status[n_ + i] = VarStatus::kBasic;
    assigned[n_ + i] = true;
  }
  status_ = std::move(status);
  basis_ = std::move(basis);
  for (int j = 0; j < total; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    const bool lo_ok = std::isfinite(lo_[j]);
    const bool hi_ok = std::isfinite(hi_[j]);
    const bool stale = !assigned[j] || (status_[j] == VarStatus::kAtLower && !lo_ok) ||
                       (status_[j] == VarStatus::kAtUpper && !hi_ok) ||
                       (status_[j] == VarStatus::kFree && (lo_ok || hi_ok));
    if (stale) {
      status_[j] = lo_ok ? VarStatus::kAtLower : hi_ok ? VarStatus::kAtUpper : VarStatus::kFree;
    }
  }
  x_.assign(total, 0.0);
  for (int j = 0; j < total; ++j) {
    if (status_[j] != VarStatus::kBasic) x_[j] = nonbasic_value(j);
  }
}

void SimplexSolver::cold_basis() {
  const int total = n_ + m_;
  status_.assign(total, VarStatus::kAtLower);
  basis_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    status_[j] = std::isfinite(lo_[j])   ? VarStatus::kAtLower
                 : std::isfinite(hi_[j]) ? VarStatus::kAtUpper
                                         : VarStatus::kFree;
  }
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    status_[n_ + i] = VarStatus::kBasic;
  }
  x_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) x_[j] = nonbasic_value(j);
}

void SimplexSolver::column(int j, Eigen::VectorXd& out) const {
  if (j < n_) {
    out = a_.col(j);
  } else {
    out.setZero(m_);
    out(j - n_) = 1.0;
  }
}

double SimplexSolver::column_dot(int j, const Eigen::RowVectorXd& y) const {
  return j < n_ ? y.dot(a_.col(j)) : y(j - n_);
}

bool SimplexSolver::refactor() {
  Eigen::MatrixXd basis_matrix(m_, m_);
  Eigen::VectorXd col;
  for (int i = 0; i < m_; ++i) {
    column(basis_[i], col);
    basis_matrix.col(i) = col;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  if (!(lu.rcond() > 1e-13)) return false;
  binv_ = lu.inverse();
  return true;
}

void SimplexSolver::compute_basic_values() {
  Eigen::VectorXd rhs = b_;
  for (int j = 0; j < n_; ++j) {
    if (status_[j] != VarStatus::kBasic && x_[j] != 0.0) rhs -= a_.col(j) * x_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (status_[j] != VarStatus::kBasic) rhs(i) -= x_[j];
  }
  const Eigen::VectorXd xb = binv_ * rhs;
  for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
}

LpOutcome SimplexSolver::trivial_solve() {
  LpOutcome out;
  out.x.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    const double c = cost_[j];
    if (c > 0.0) {
      if (!std::isfinite(lo_[j])) {
        out.status = Status::kUnbounded;
        out.ray.assign(n_, 0.0);
        out.ray[j] = -1.0;
        return out;
      }
      out.x[j] = lo_[j];
    } else if (c < 0.0) {
      if (!std::isfinite(hi_[j])) {
        out.status = Status::kUnbounded;
        out.ray.assign(n_, 0.0);
        out.ray[j] = 1.0;
        return out;
      }
      out.x[j] = hi_[j];
    } else {
      out.x[j] = std::isfinite(lo_[j]) ? lo_[j] : std::isfinite(hi_[j]) ? hi_[j] : 0.0;
    }
  }
  out.status = Status::kOptimal;
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += problem_.objective()[j] * out.x[j];
  out.objective = obj;
  out.reduced_costs.assign(problem_.objective().begin(), problem_.objective().end());
  return out;
}

LpOutcome SimplexSolver::finish_optimal(std::int64_t iterations) {
  LpOutcome out;
  out.status = Status::kOptimal;
  out.iterations = iterations;
  out.x.assign(x_.begin(), x_.begin() + n_);
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += problem_.objective()[j] * out.x[j];
  out.objective = obj;

  Eigen::RowVectorXd cb(m_);
  for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
  const Eigen::RowVectorXd y = cb * binv_;
  const Eigen::RowVectorXd ya = y * a_;
  const double sign = problem_.sense() == Sense::kMaximize ? -1.0 : 1.0;
  out.row_duals.resize(m_);
  for (int i = 0; i < m_; ++i) out.row_duals[i] = sign * y(i);
  out.reduced_costs.resize(n_);
  for (int j = 0; j < n_; ++j) out.reduced_costs[j] = sign * (cost_[j] - ya(j));
  return out;
}

LpOutcome SimplexSolver::solve() {
  load();
  if (m_ == 0) return trivial_solve();

  if (!refactor()) {
    cold_basis();
    if (!refactor()) {
      LpOutcome out;
      out.message = "slack basis could not be factorised";
      return out;
    }
  }
  compute_basic_values();

  const int total = n_ + m_;
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  const std::int64_t degenerate_limit = 10LL * (m_ + n_);

  std::int64_t iterations = 0;
  std::int64_t degenerate_run = 0;
  int since_refactor = 0;
  bool bland = false;

  Eigen::RowVectorXd cb(m_);
  Eigen::VectorXd col(m_);
  Eigen::VectorXd alpha(m_);

  while (true) {
    if (iterations >= options_.max_iterations) {
      LpOutcome out;
      out.status = Status::kNumericalFailure;
      out.iterations = iterations;
      out.message = "iteration limit reached";
      return out;
    }

    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int var = basis_[i];
      const double v = x_[var];
      if (v < lo_[var] - ptol) {
        cb(i) = -1.0;
        phase1 = true;
      } else if (v > hi_[var] + ptol) {
        cb(i) = 1.0;
        phase1 = true;
      } else {
        cb(i) = 0.0;
      }
    }
    if (!phase1) {
      for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    }
    const Eigen::RowVectorXd y = cb * binv_;
    const Eigen::RowVectorXd ya = y * a_;

    // Pricing.
    int entering = -1;
    double dir = 0.0;
    double best = 0.0;
    for (int j = 0; j < total; ++j) {
      const auto st = status_[j];
      if (st == VarStatus::kBasic || lo_[j] == hi_[j]) continue;
      const double cj = phase1 ? 0.0 : cost_[j];
      const double d = cj - (j < n_ ? ya(j) : y(j - n_));
      double candidate_dir = 0.0;
      if (st == VarStatus::kAtLower && d < -dtol) {
        candidate_dir = 1.0;
      } else if (st == VarStatus::kAtUpper && d > dtol) {
        candidate_dir = -1.0;
      } else if (st == VarStatus::kFree && std::abs(d) > dtol) {
        candidate_dir = d < 0.0 ? 1.0 : -1.0;
      }
      if (candidate_dir == 0.0) continue;
      if (bland) {
        entering = j;
        dir = candidate_dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        dir = candidate_dir;
      }
    }

    if (entering < 0) {
      if (since_refactor > 0) {
        // Confirm the verdict on a fresh factorisation.
        if (!refactor()) {
          cold_basis();
          refactor();
        }
        compute_basic_values();
        since_refactor = 0;
        continue;
      }
      if (phase1) {
        LpOutcome out;
        out.status = Status::kInfeasible;
        out.iterations = iterations;
        out.farkas.assign(y.data(), y.data() + m_);
        return out;
      }
      return finish_optimal(iterations);
    }

    column(entering, col);
    alpha.noalias() = binv_ * col;

    // Ratio test. leave == -1 with a finite theta denotes a bound flip of the entering
    // variable.
    double theta = (std::isfinite(lo_[entering]) && std::isfinite(hi_[entering]))
                       ? hi_[entering] - lo_[entering]
                       : kInfinity;
    int leave = -1;
    bool leave_to_upper = false;
    double leave_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha(i);
      if (std::abs(a) <= options_.pivot_tolerance) continue;
      const double delta = -dir * a;
      const int var = basis_[i];
      const double v = x_[var];
      double limit = kInfinity;
      bool to_upper = false;
      if (phase1 && v < lo_[var] - ptol) {
        if (delta > 0.0) limit = (lo_[var] - v) / delta;
      } else if (phase1 && v > hi_[var] + ptol) {
        if (delta < 0.0) {
          limit = (hi_[var] - v) / delta;
          to_upper = true;
        }
      } else if (delta > 0.0 && std::isfinite(hi_[var])) {
        limit = (hi_[var] - v) / delta;
        to_upper = true;
      } else if (delta < 0.0 && std::isfinite(lo_[var])) {
        limit = (lo_[var] - v) / delta;
      }
      if (!std::isfinite(limit)) continue;
      limit = std::max(limit, 0.0);
      bool take = false;
      if (limit < theta - kTieTolerance) {
        take = true;
      } else if (leave >= 0 && limit <= theta + kTieTolerance) {
        take = bland ? var < basis_[leave] : std::abs(a) > leave_alpha;
      }
      if (take) {
        theta = std::min(theta, limit);
        leave = i;
        leave_to_upper = to_upper;
        leave_alpha = std::abs(a);
      }
    }

    if (leave < 0 && !std::isfinite(theta)) {
      LpOutcome out;
      out.iterations = iterations;
      if (phase1) {
        out.status = Status::kNumericalFailure;
        out.message = "phase 1 direction without a blocking variable";
        return out;
      }
      std::vector<double> ray(total, 0.0);
      ray[entering] = dir;
      for (int i = 0; i < m_; ++i) ray[basis_[i]] = -dir * alpha(i);
      out.status = Status::kUnbounded;
      out.ray.assign(ray.begin(), ray.begin() + n_);
      return out;
    }

    x_[entering] += dir * theta;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * alpha(i) * theta;

    degenerate_run = theta <= kDegenerateStep ? degenerate_run + 1 : 0;
    if (degenerate_run > degenerate_limit) bland = true;
    ++iterations;

    if (leave < 0) {
      if (dir > 0.0) {
        status_[entering] = VarStatus::kAtUpper;
        x_[entering] = hi_[entering];
      } else {
        status_[entering] = VarStatus::kAtLower;
        x_[entering] = lo_[entering];
      }
      continue;
    }

    const int out_var = basis_[leave];
    status_[out_var] = leave_to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
    x_[out_var] = leave_to_upper ? hi_[out_var] : lo_[out_var];
    basis_[leave] = entering;
    status_[entering] = VarStatus::kBasic;

    const Eigen::RowVectorXd pivot_row = binv_.row(leave) / alpha(leave);
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(leave) = pivot_row;

    if (++since_refactor >= options_.refactor_interval) {
      if (!refactor()) {
        cold_basis();
        refactor();
      }
      compute_basic_values();
      since_refactor = 0;
    }
  }
}

LpOutcome solve(const LpProblem& problem, const SimplexOptions& options) {
  SimplexSolver solver(problem, options);
  return solver.solve();
}

double max_primal_violation(const LpProblem& problem, std::span<const double> x) {
  if (static_cast<int>(x.size()) != problem.num_vars()) {
    throw DimensionError("point size does not match the LP");
  }
  double worst = 0.0;
  for (int j = 0; j < problem.num_vars(); ++j) {
    worst = std::max(worst, problem.lower()[j] - x[j]);
    worst = std::max(worst, x[j] - problem.upper()[j]);
  }
  for (const auto& row : problem.rows()) {
    double ax = 0.0;
    for (int j = 0; j < problem.num_vars(); ++j) ax += row.coeffs[j] * x[j];
    const double r = ax - row.rhs;
    switch (row.relation) {
      case Relation::kLessEqual:
        worst = std::max(worst, r);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, -r);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(r));
        break;
    }
  }
  return worst;
}

bool is_farkas_certificate(const LpProblem& problem, std::span<const double> y, double tol) {
  const int m = problem.num_rows();
  const int n = problem.num_vars();
  if (static_cast<int>(y.size()) != m) return false;
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;

  auto sup_term = [tol](double d, double lo, double hi, double& acc) {
    if (d > tol) {
      if (!std::isfinite(hi)) return false;
      acc += d * hi;
    } else if (d < -tol) {
      if (!std::isfinite(lo)) return false;
      acc += d * lo;
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      acc += std::max(d * lo, d * hi);
    }
    return true;
  };

  double sup = 0.0;
  double yb = 0.0;
  for (int i = 0; i < m; ++i) {
    const double yi = y[i] / scale;
    yb += yi * problem.row(i).rhs;
    const auto [slo, shi] = slack_bounds(problem.row(i).relation);
    if (!sup_term(yi, slo, shi, sup)) return false;
  }
  for (int j = 0; j < n; ++j) {
    double d = 0.0;
    for (int i = 0; i < m; ++i) d += y[i] / scale * problem.row(i).coeffs[j];
    if (!sup_term(d, problem.lower()[j], problem.upper()[j], sup)) return false;
  }
  return sup < yb - tol;
}

bool is_improving_ray(const LpProblem& problem, std::span<const double> ray, double tol) {
  const int n = problem.num_vars();
  if (static_cast<int>(ray.size()) != n) return false;
  double scale = 0.0;
  for (double v : ray) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  std::vector<double> r(ray.begin(), ray.end());
  for (double& v : r) v /= scale;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(problem.lower()[j]) && r[j] < -tol) return false;
    if (std::isfinite(problem.upper()[j]) && r[j] > tol) return false;
  }
  for (const auto& row : problem.rows()) {
    double ar = 0.0;
    for (int j = 0; j < n; ++j) ar += row.coeffs[j] * r[j];
    if (row.relation == Relation::kLessEqual && ar > tol) return false;
    if (row.relation == Relation::kGreaterEqual && ar < -tol) return false;
    if (row.relation == Relation::kEqual && std::abs(ar) > tol) return false;
  }
  double cr = 0.0;
  for (int j = 0; j < n; ++j) cr += problem.objective()[j] * r[j];
  return problem.sense() == Sense::kMinimize ? cr < -tol : cr > tol;
}

}  // namespace ddconvex::lp
