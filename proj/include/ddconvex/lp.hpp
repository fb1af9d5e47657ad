// SPDX-License-Identifier: Apache-2.0

// Dense bounded-variable revised simplex.
//
// Problems have the form
//
//   min/max  c'x   s.t.  a_i'x {<=,=,>=} b_i,   l <= x <= u,
//
// with infinite bounds allowed. Internally each row gets a logical (slack)
// variable s_i so that A x + s = b; the slack bounds encode the relation.
// Phase 1 minimises the sum of bound violations of the basic variables, which
// lets the solver restart from any basis (used for warm starts after rows are
// appended).

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddconvex::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Row {
  std::vector<double> coeffs;  // dense, one entry per variable
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

class LpProblem {
 public:
  LpProblem() = default;
  explicit LpProblem(Sense sense) : sense_(sense) {}

  /// Appends a variable and returns its index. Existing rows get a zero coefficient.
  int add_variable(double lower, double upper, double cost = 0.0);
  /// Appends a row; `coeffs` may be shorter than num_vars() (missing entries are zero).
  int add_row(std::vector<double> coeffs, Relation relation, double rhs);

  void set_cost(int var, double cost) { objective_.at(var) = cost; }
  void set_bounds(int var, double lower, double upper);
  void set_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }
  void set_sense(Sense sense) { sense_ = sense; }

  Sense sense() const { return sense_; }
  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  std::span<const double> objective() const { return objective_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  const Row& row(int i) const { return rows_.at(i); }
  std::span<const Row> rows() const { return rows_; }

  /// Throws DimensionError / ParameterError on inconsistent data.
  void validate() const;

 private:
  Sense sense_ = Sense::kMinimize;
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
};

enum class Status { kOptimal, kUnbounded, kInfeasible, kNumericalFailure };

std::string to_string(Status status);

struct LpOutcome {
  Status status = Status::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> x;               // primal point (Optimal)
  std::vector<double> row_duals;       // Optimal: y with reduced costs c - A'y
  std::vector<double> reduced_costs;   // Optimal
  std::vector<double> ray;             // Unbounded: improving recession direction
  std::vector<double> farkas;          // Infeasible: row multipliers (see is_farkas_certificate)
  std::int64_t iterations = 0;
  std::string message;
};

struct SimplexOptions {
  std::int64_t max_iterations = 1'000'000;
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_interval = 64;
};

/// A simplex instance that keeps its basis between solves. Appending rows or
/// variables and calling solve() again restarts from the previous basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(LpProblem problem, SimplexOptions options = {});

  int add_row(std::vector<double> coeffs, Relation relation, double rhs);
  int add_variable(double lower, double upper, double cost = 0.0);
  void set_bounds(int var, double lower, double upper) { problem_.set_bounds(var, lower, upper); }
  void set_rhs(int row, double rhs) { problem_.set_rhs(row, rhs); }

  LpOutcome solve();
  const LpProblem& problem() const { return problem_; }

 private:
  enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

  void load();
  void cold_basis();
  bool refactor();
  void compute_basic_values();
  double nonbasic_value(int j) const;
  void column(int j, Eigen::VectorXd& out) const;
  double column_dot(int j, const Eigen::RowVectorXd& y) const;
  LpOutcome trivial_solve();
  LpOutcome finish_optimal(std::int64_t iterations);

  LpProblem problem_;
  SimplexOptions options_;

  // Working data (rebuilt by load()).
  int n_ = 0;  // structural variables
  int m_ = 0;  // rows
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<double> cost_;  // minimisation costs, size n_ + m_
  std::vector<double> lo_;
  std::vector<double> hi_;

  std::vector<int> basis_;  // basic variable per row
  std::vector<VarStatus> status_;
  std::vector<double> x_;
  Eigen::MatrixXd binv_;
};

/// Solves from a cold slack basis.
LpOutcome solve(const LpProblem& problem, const SimplexOptions& options = {});

/// Largest bound or row violation of `x`.
double max_primal_violation(const LpProblem& problem, std::span<const double> x);

/// True iff `y` proves infeasibility: with d = A'y on the structurals and d_i = y_i on
/// the row slacks, sup over the variable box of d'z lies strictly below y'b.
bool is_farkas_certificate(const LpProblem& problem, std::span<const double> y,
                           double tol = 1e-7);

/// True iff `ray` is a recession direction of the feasible region that improves the
/// objective.
bool is_improving_ray(const LpProblem& problem, std::span<const double> ray, double tol = 1e-7);

}  // namespace ddconvex::lp
