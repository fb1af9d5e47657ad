#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "ddconvex/error.hpp"
#include "ddconvex/problem.hpp"

using namespace ddconvex;

namespace {

std::shared_ptr<LeastSquaresLoss> random_loss(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = z(rng);
    y[i] = z(rng);
  }
  return std::make_shared<LeastSquaresLoss>(x, y);
}

}  // namespace

TEST_CASE("least-squares loss values") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  const LeastSquaresLoss loss(x, y);
  CHECK(loss.dim() == 2);
  CHECK(loss.value(std::vector<double>{0, 0}) == doctest::Approx(14.0));
  CHECK(loss.value(std::vector<double>{1, 2}) == doctest::Approx(0.0));
  std::vector<double> g(2);
  loss.gradient(std::vector<double>{0, 0}, g);
  // 2 X'(X b - y) at b = 0 is -2 X'y = -2 (4, 5).
  CHECK(g[0] == doctest::Approx(-8.0));
  CHECK(g[1] == doctest::Approx(-10.0));
  CHECK_THROWS_AS(loss.value(std::vector<double>{1}), DimensionError);
  CHECK_THROWS_AS(loss.gradient(std::vector<double>{1, 2}, std::span<double>(g).first(1)), DimensionError);
}

TEST_CASE("identity design with y = beta has zero loss") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd y(4);
  y << 0.5, -1, 2, 3;
  const LeastSquaresLoss loss(x, y);
  CHECK(loss.value(std::vector<double>{0.5, -1, 2, 3}) == 0.0);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 5;
    const auto loss = random_loss(rng, 15, p);
    std::normal_distribution<double> z(0.0, 2.0);
    std::vector<double> b(p);
    for (double& v : b) v = z(rng);
    std::vector<double> g(p);
    loss->gradient(b, g);
    for (int i = 0; i < p; ++i) {
      const double h = 1e-6;
      auto bp = b;
      auto bm = b;
      bp[i] += h;
      bm[i] -= h;
      CHECK(std::abs((loss->value(bp) - loss->value(bm)) / (2 * h) - g[i]) <= 1e-5);
    }
  }
}

TEST_CASE("objective is the exact sum of its parts") {
  std::mt19937_64 rng(6);
  const auto loss = random_loss(rng, 10, 3);
  const auto prob = make_problem(loss, SeparableScale::broadcast(ScaleComponent::scad(1, 3), 3));
  std::normal_distribution<double> z(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> b{z(rng), z(rng), z(rng)};
    const double total = prob.objective(b);
    CHECK(total == loss->value(b) + prob.penalty.eval(b));
    CHECK(total >= 0.0);
  }
  CHECK(prob.objective(std::vector<double>{0, 0, 0}) == doctest::Approx(loss->y().squaredNorm()));
}

TEST_CASE("penalized subsets and budget feasibility") {
  std::mt19937_64 rng(7);
  ScaleProblem prob;
  prob.loss = random_loss(rng, 8, 3);
  prob.penalized = {0, 2};
  prob.penalty = SeparableScale::broadcast(ScaleComponent::l0(), 2);
  prob.form = PenaltyForm::kBudget;
  prob.budget = 1.0;
  prob.validate();
  const std::vector<double> b{0.0, 5.0, 2.0};
  CHECK(prob.restrict(b) == std::vector<double>{0.0, 2.0});
  CHECK(prob.penalty_value(b) == 1.0);
  CHECK(prob.feasible(b));
  CHECK_FALSE(prob.feasible(std::vector<double>{1.0, 0.0, 1.0}));
  CHECK(prob.objective(b) == prob.loss->value(b));

  prob.penalized = {2, 0};
  CHECK_THROWS_AS(prob.validate(), ParameterError);
  prob.penalized = {0, 3};
  CHECK_THROWS(prob.validate());
  prob.penalized = {0};
  CHECK_THROWS_AS(prob.validate(), DimensionError);
}
