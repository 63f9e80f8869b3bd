#include "spfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "spfem/error.hpp"

namespace spfem {
namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

// Legendre polynomial P_n and its first derivative at x, |x| < 1,
// via the three-term recurrence.
struct LegendreValue {
  double p;   // P_n(x)
  double dp;  // P_n'(x)
};

LegendreValue legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double pm1 = 1.0;  // P_0
  double p = x;      // P_1
  for (int k = 2; k <= n; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pk;
  }
  double dp = n * (pm1 - x * p) / (1.0 - x * x);
  return {p, dp};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) fail(Errc::TooFewPoints, "gauss_legendre needs n >= 1");

  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;

  if (n == 1) {
    rule.points[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }

  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    LegendreValue v{};
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      v = legendre(n, x);
      double dx = -v.p / v.dp;
      x += dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    v = legendre(n, x);
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * v.dp * v.dp);
  }

  // The initial guesses run from +1 toward -1; store ascending.
  std::reverse(rule.points.data(), rule.points.data() + n);
  std::reverse(rule.weights.data(), rule.weights.data() + n);
  return rule;
}

QuadratureRule gauss_lobatto(int n) {
  if (n < 2) fail(Errc::TooFewPoints, "gauss_lobatto needs n >= 2");

  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 3;

  const int m = n - 1;
  rule.points[0] = -1.0;
  rule.points[n - 1] = 1.0;

  // Interior points are the roots of P_{n-1}'.  Newton with
  // P_{n-1}'' eliminated through the Legendre ODE.
  for (int i = 1; i < n - 1; ++i) {
    double x = std::cos(std::numbers::pi * (n - 1 - i) / m);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      LegendreValue v = legendre(m, x);
      double d2 = (2.0 * x * v.dp - m * (m + 1.0) * v.p) / (1.0 - x * x);
      double dx = -v.dp / d2;
      x += dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    rule.points[i] = x;
  }

  for (int i = 0; i < n; ++i) {
    double p = legendre(m, rule.points[i]).p;
    rule.weights[i] = 2.0 / (n * m * p * p);
  }
  return rule;
}

}  // namespace spfem
