// SPDX-License-Identifier: Apache-2.0

// Adaptive Simpson quadrature of the SCAD / MCP derivative integrands. Test-only:
// the library evaluates closed forms, this recomputes the defining integrals.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace ddconvex::oracle {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol, int depth, int forced) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (forced <= 0 && (depth <= 0 || std::abs(delta) <= 15.0 * tol)) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, forced - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, forced - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Forced subdivision keeps a coincidentally small first error estimate on a
  // piecewise integrand from ending the recursion early.
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60, 8);
}

/// lambda * int_0^|x| min{1, (gamma - y/lambda)_+ / (gamma - 1)} dy
inline double scad_quadrature(double lambda, double gamma, double x) {
  auto integrand = [=](double y) {
    return std::min(1.0, std::max(0.0, gamma - y / lambda) / (gamma - 1.0));
  };
  return lambda * integrate(integrand, 0.0, std::abs(x));
}

/// lambda * int_0^|x| (1 - y/(lambda gamma))_+ dy
inline double mcp_quadrature(double lambda, double gamma, double x) {
  auto integrand = [=](double y) { return std::max(0.0, 1.0 - y / (lambda * gamma)); };
  return lambda * integrate(integrand, 0.0, std::abs(x));
}

}  // namespace ddconvex::oracle
