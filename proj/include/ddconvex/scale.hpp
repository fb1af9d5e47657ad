// SPDX-License-Identifier: Apache-2.0

// Separable scale functions: eta(x) = sum_i eta_i(x_i) where every eta_i is zero
// exactly at the origin, non-decreasing on [0, inf) and non-increasing on (-inf, 0].

#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ddconvex {

inline constexpr double kUnboundedScale = std::numeric_limits<double>::infinity();

class ScaleComponent {
 public:
  enum class Kind { kLpPower, kL0, kScad, kMcp };

  /// |x|^p, p > 0.
  static ScaleComponent lp_power(double p);
  /// 0 at x = 0, 1 elsewhere.
  static ScaleComponent l0();
  /// lambda * int_0^|x| min{1, (gamma - y/lambda)_+ / (gamma - 1)} dy, lambda > 0, gamma > 2.
  static ScaleComponent scad(double lambda, double gamma);
  /// lambda * int_0^|x| (1 - y/(lambda gamma))_+ dy, lambda > 0, gamma > 0.
  static ScaleComponent mcp(double lambda, double gamma);

  Kind kind() const { return kind_; }
  double power() const { return a_; }
  double lambda() const { return a_; }
  double gamma() const { return b_; }

  /// eta_i(x). Infinite arguments are allowed: saturating kinds return their plateau.
  double operator()(double x) const;

  std::string describe() const;

 private:
  ScaleComponent(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;  // p for kLpPower, lambda for kScad / kMcp
  double b_;  // gamma for kScad / kMcp
};

double eval_component(const ScaleComponent& c, double x);

/// Exact minimum of c over [lo, hi]: c(hi) if hi <= 0, c(lo) if lo >= 0, else 0.
/// Throws IntervalError if lo > hi or the selected endpoint is infinite.
double interval_lower_bound(const ScaleComponent& c, double lo, double hi);

/// Maximum of c over [lo, hi], attained at an endpoint. May be +inf for unbounded
/// intervals of non-saturating kinds.
double interval_upper_bound(const ScaleComponent& c, double lo, double hi);

class SeparableScale {
 public:
  SeparableScale() = default;
  explicit SeparableScale(std::vector<ScaleComponent> components)
      : components_(std::move(components)) {}

  /// The same component on every one of `n` coordinates.
  static SeparableScale broadcast(const ScaleComponent& c, int n);

  int size() const { return static_cast<int>(components_.size()); }
  const ScaleComponent& operator[](int i) const { return components_.at(i); }
  std::span<const ScaleComponent> components() const { return components_; }

  /// sum_i eta_i(x_i); throws DimensionError if x.size() != size().
  double eval(std::span<const double> x) const;

 private:
  std::vector<ScaleComponent> components_;
};

}  // namespace ddconvex
