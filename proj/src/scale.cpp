// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/scale.hpp"

#include <cmath>
#include <sstream>

#include "ddconvex/error.hpp"

namespace ddconvex {

ScaleComponent ScaleComponent::lp_power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("lp power requires p > 0");
  return ScaleComponent(Kind::kLpPower, p, 0.0);
}

ScaleComponent ScaleComponent::l0() { return ScaleComponent(Kind::kL0, 0.0, 0.0); }

ScaleComponent ScaleComponent::scad(double lambda, double gamma) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("SCAD requires lambda > 0");
  if (!(gamma > 2.0) || !std::isfinite(gamma)) throw ParameterError("SCAD requires gamma > 2");
  return ScaleComponent(Kind::kScad, lambda, gamma);
}

ScaleComponent ScaleComponent::mcp(double lambda, double gamma) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("MCP requires lambda > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("MCP requires gamma > 0");
  return ScaleComponent(Kind::kMcp, lambda, gamma);
}

double ScaleComponent::operator()(double x) const {
  const double ax = std::abs(x);
  switch (kind_) {
    case Kind::kLpPower:
      if (ax == 0.0) return 0.0;
      if (a_ == 1.0) return ax;
      if (a_ == 2.0) return ax * ax;
      return std::exp(a_ * std::log(ax));
    case Kind::kL0:
      return ax == 0.0 ? 0.0 : 1.0;
    case Kind::kScad: {
      const double lam = a_;
      const double gam = b_;
      if (ax <= lam) return lam * ax;
      if (ax <= gam * lam) return (2.0 * gam * lam * ax - ax * ax - lam * lam) / (2.0 * (gam - 1.0));
      return lam * lam * (gam + 1.0) / 2.0;
    }
    case Kind::kMcp: {
      const double lam = a_;
      const double gam = b_;
      if (ax <= gam * lam) return lam * ax - ax * ax / (2.0 * gam);
      return gam * lam * lam / 2.0;
    }
  }
  return 0.0;
}

std::string ScaleComponent::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kLpPower:
      os << "lp(p=" << a_ << ")";
      break;
    case Kind::kL0:
      os << "l0";
      break;
    case Kind::kScad:
      os << "scad(lambda=" << a_ << ",gamma=" << b_ << ")";
      break;
    case Kind::kMcp:
      os << "mcp(lambda=" << a_ << ",gamma=" << b_ << ")";
      break;
  }
  return os.str();
}

double eval_component(const ScaleComponent& c, double x) { return c(x); }

double interval_lower_bound(const ScaleComponent& c, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw IntervalError("interval lower bound requires lo <= hi");
  }
  if (hi <= 0.0) {
    if (!std::isfinite(hi)) throw IntervalError("selected interval endpoint is infinite");
    return c(hi);
  }
  if (lo >= 0.0) {
    if (!std::isfinite(lo)) throw IntervalError("selected interval endpoint is infinite");
    return c(lo);
  }
  return 0.0;
}

double interval_upper_bound(const ScaleComponent& c, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw IntervalError("interval upper bound requires lo <= hi");
  }
  if (c.kind() == ScaleComponent::Kind::kL0) {
    return (lo == 0.0 && hi == 0.0) ? 0.0 : 1.0;
  }
  return std::max(c(lo), c(hi));
}

SeparableScale SeparableScale::broadcast(const ScaleComponent& c, int n) {
  if (n < 0) throw DimensionError("negative dimension");
  return SeparableScale(std::vector<ScaleComponent>(static_cast<std::size_t>(n), c));
}

double SeparableScale::eval(std::span<const double> x) const {
  if (x.size() != components_.size()) {
    throw DimensionError("scale dimension " + std::to_string(components_.size()) +
                         " does not match point dimension " + std::to_string(x.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += components_[i](x[i]);
  return total;
}

}  // namespace ddconvex
