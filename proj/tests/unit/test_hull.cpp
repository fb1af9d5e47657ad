#include <doctest.h>

#include <cmath>
#include <random>

#include "ddconvex/error.hpp"
#include "ddconvex/hull.hpp"
#include "oracles/instances.hpp"

using namespace ddconvex;

namespace {

Box cube(int n, double lo, double hi) { return Box(std::vector<Interval>(n, Interval{lo, hi})); }

Diagram fstar() {
  const std::vector<Interval> parts{{-7, -2}, {-2, 3}, {3, 8}};
  return build(SeparableScale::broadcast(ScaleComponent::lp_power(1), 3), cube(3, -7, 8),
               PartitionScheme(std::vector<std::vector<Interval>>(3, parts)), 4.0);
}

Diagram one_two() {
  const auto s = SeparableScale::broadcast(ScaleComponent::lp_power(1), 1);
  const Box box(std::vector<Interval>{{1, 2}});
  return build(s, box, PartitionScheme::single(box), 10.0);
}

struct Instance {
  Diagram d;
  std::vector<std::vector<double>> points;
};

Instance random_instance(std::mt19937_64& rng, bool epigraph) {
  std::uniform_int_distribution<int> dims(1, 3);
  const int n = dims(rng);
  const auto s = oracle::random_scale(rng, n);
  const auto box = oracle::random_box(rng, n);
  const auto parts = oracle::random_parts(rng, box, 3);
  Diagram d = epigraph ? build_epigraph(s, box, parts, 0.0, s.eval(oracle::uniform_point(rng, box)) + 1.0, 3)
                       : build(s, box, parts, oracle::random_budget(rng, s, box));
  auto pts = enumerate_paths(d, 1 << 16);
  return {std::move(d), std::move(pts)};
}

std::vector<double> random_probe(std::mt19937_64& rng, const Diagram& d) {
  std::vector<double> lo(d.dims(), 1e300);
  std::vector<double> hi(d.dims(), -1e300);
  for (const auto& a : d.arcs()) {
    lo[a.layer] = std::min(lo[a.layer], a.label);
    hi[a.layer] = std::max(hi[a.layer], a.label);
  }
  std::vector<double> x(d.dims());
  for (int k = 0; k < d.dims(); ++k) {
    const double w = hi[k] - lo[k] + 1.0;
    std::uniform_real_distribution<double> u(lo[k] - 0.5 * w, hi[k] + 0.5 * w);
    x[k] = u(rng);
  }
  return x;
}

double worst_violation(const Cut& cut, const Diagram& d, const std::vector<std::vector<double>>& pts) {
  double worst = -1e300;
  for (const auto& p : pts) {
    const std::span<const double> ps(p);
    const double v = d.is_epigraph() ? cut.violation(ps.first(p.size() - 1), p.back()) : cut.violation(ps);
    worst = std::max(worst, v);
  }
  return worst;
}

double cut_violation_at(const Cut& cut, const Diagram& d, std::span<const double> x) {
  return d.is_epigraph() ? cut.violation(x.first(x.size() - 1), x.back()) : cut.violation(x);
}

}  // namespace

TEST_CASE("flow model shape") {
  const auto d = fstar();
  const auto lp = flow_lp(d);
  CHECK(lp.num_rows() == static_cast<int>(d.num_nodes()) + 3);
  CHECK(lp.num_vars() == static_cast<int>(d.num_arcs()));
}

TEST_CASE("single-path diagram has the unit flow") {
  const auto s = SeparableScale::broadcast(ScaleComponent::lp_power(1), 3);
  const Box box = cube(3, 2, 2);
  const auto d = build(s, box, PartitionScheme::single(box), 10.0);
  const std::vector<double> x{2, 2, 2};
  const auto out = lp::solve(flow_lp(d, x));
  REQUIRE(out.status == lp::Status::kOptimal);
  // Each layer holds the pair of equal-label arcs; their flows sum to one.
  for (int k = 0; k < 3; ++k) {
    double total = 0.0;
    for (ArcId a : d.layer_arcs(k)) total += out.x[a.index()];
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("empty diagram gives an infeasible flow LP") {
  const auto s = SeparableScale::broadcast(ScaleComponent::lp_power(1), 2);
  const Box box = cube(2, 1, 2);
  const auto d = build(s, box, PartitionScheme::single(box), 0.5);
  REQUIRE_FALSE(d.has_path());
  CHECK(lp::solve(flow_lp(d)).status == lp::Status::kInfeasible);
  CHECK_THROWS_AS(membership(d, std::vector<double>{1, 1}), NoPathError);
}

TEST_CASE("membership examples") {
  const auto d = fstar();
  const auto pts = enumerate_paths(d, 1000);
  for (const auto& p : pts) CHECK(membership(d, p) == Membership::kInside);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int i = 0; i < 50; ++i) {
    const auto& a = pts[pick(rng)];
    const auto& b = pts[pick(rng)];
    std::vector<double> mid(3);
    for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    CHECK(membership(d, mid) == Membership::kInside);
  }
  double min1 = 1e300;
  for (const auto& p : pts) min1 = std::min(min1, p[0]);
  CHECK(membership(d, std::vector<double>{min1 - 0.1, 0, 0}) == Membership::kOutside);
  CHECK(membership(d, std::vector<double>{4, 4, 4}) == Membership::kInside);
  CHECK(membership(d, std::vector<double>{8, 8, 8}) == Membership::kOutside);
}

TEST_CASE("exact separation examples") {
  const auto d = fstar();
  const auto pts = enumerate_paths(d, 1000);
  for (const auto& p : pts) CHECK(separate_exact(d, p).inside);
  std::vector<double> mid(3);
  for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (pts.front()[k] + pts.back()[k]);
  CHECK(separate_exact(d, mid).inside);

  const auto line = one_two();
  const auto sep = separate_exact(line, std::vector<double>{3.0});
  REQUIRE_FALSE(sep.inside);
  REQUIRE(sep.cut);
  CHECK(sep.omega > 0);
  CHECK(sep.cut->coeffs[0] > 0);
  CHECK(sep.cut->rhs / sep.cut->coeffs[0] == doctest::Approx(2.0));
  CHECK(sep.cut->violation(std::vector<double>{3.0}) > 0);
}

TEST_CASE("subgradient separation examples") {
  const auto d = fstar();
  for (const auto& p : enumerate_paths(d, 1000)) CHECK_FALSE(separate_subgradient(d, p).cut);

  SubgradientOptions opts;
  opts.initial_direction = std::vector<double>{1.0};
  const auto res = separate_subgradient(one_two(), std::vector<double>{3.0}, opts);
  REQUIRE(res.cut);
  CHECK(res.best_iteration == 0);
  CHECK(res.cut->coeffs[0] == doctest::Approx(1.0));
  CHECK(res.cut->rhs == doctest::Approx(2.0));
  CHECK(res.best_violation == doctest::Approx(1.0));
}

TEST_CASE("cut validity on random diagrams") {
  std::mt19937_64 rng(55);
  int cuts = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, trial % 4 == 3);
    if (!inst.d.has_path()) continue;
    for (int probe = 0; probe < 3; ++probe) {
      const auto x = random_probe(rng, inst.d);
      const auto sub = separate_subgradient(inst.d, x);
      if (sub.cut) {
        CHECK(worst_violation(*sub.cut, inst.d, inst.points) <= 1e-9);
        ++cuts;
      }
      const auto ex = separate_exact(inst.d, x);
      if (ex.cut) {
        CHECK(worst_violation(*ex.cut, inst.d, inst.points) <= 1e-9);
        CHECK(cut_violation_at(*ex.cut, inst.d, x) > 0);
      }
    }
  }
  CHECK(cuts > 100);
}

TEST_CASE("exact and subgradient verdicts agree") {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, trial % 3 == 2);
    if (!inst.d.has_path()) continue;
    const auto x = random_probe(rng, inst.d);
    const auto ex = separate_exact(inst.d, x);
    const auto sub = separate_subgradient(inst.d, x);
    if (ex.inside && sub.cut) CHECK(cut_violation_at(*sub.cut, inst.d, x) <= 1e-7);
    if (sub.cut && sub.best_violation > 1e-7) CHECK(ex.omega > 0);
    CHECK(ex.inside == (membership(inst.d, x) == Membership::kInside));
  }
}

TEST_CASE("projection contract and monotone best violation") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng, trial % 2 == 1);
    if (!inst.d.has_path()) continue;
    SubgradientOptions opts;
    opts.record_trace = true;
    opts.max_iters = 30;
    const auto x = random_probe(rng, inst.d);
    const auto res = separate_subgradient(inst.d, x, opts);
    CHECK(res.direction_norms.size() == 30);
    CHECK(res.best_trace.size() == 30);
    for (double nrm : res.direction_norms) CHECK(nrm <= 1.0 + 1e-12);
    for (std::size_t k = 1; k < res.best_trace.size(); ++k) CHECK(res.best_trace[k] >= res.best_trace[k - 1]);
    CHECK(res.cut.has_value() == (res.best_trace.back() > 0.0));
  }
}

TEST_CASE("convex combinations of enumerated points are members") {
  std::mt19937_64 rng(88);
  int trials = 0;
  while (trials < 1000) {
    const auto inst = random_instance(rng, false);
    if (inst.points.empty()) continue;
    for (int rep = 0; rep < 20 && trials < 1000; ++rep, ++trials) {
      std::uniform_int_distribution<std::size_t> pick(0, inst.points.size() - 1);
      std::uniform_int_distribution<int> count(1, 4);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const int k = count(rng);
      std::vector<double> w(k);
      double total = 0.0;
      for (double& v : w) total += v = u(rng) + 1e-3;
      std::vector<double> x(inst.d.dims(), 0.0);
      for (int j = 0; j < k; ++j) {
        const auto& p = inst.points[pick(rng)];
        for (int c = 0; c < inst.d.dims(); ++c) x[c] += w[j] / total * p[c];
      }
      CHECK(membership(inst.d, x) == Membership::kInside);
    }
  }
}
