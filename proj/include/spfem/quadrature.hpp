#pragma once

#include <functional>

#include <Eigen/Core>

namespace spfem {

// Quadrature rule on the reference interval [-1, 1].
// Points are sorted ascending; weights sum to 2.
struct QuadratureRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int exactness;  // highest polynomial degree integrated exactly

  double integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (Eigen::Index q = 0; q < points.size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

// n >= 1 points, exact for degree 2n-1.
QuadratureRule gauss_legendre(int n);

// n >= 2 points including both endpoints, exact for degree 2n-3.
QuadratureRule gauss_lobatto(int n);

}  // namespace spfem
