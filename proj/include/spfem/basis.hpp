#pragma once

#include <vector>

#include <Eigen/Core>

namespace spfem {

// Dense polynomial, coefficients ascending in the power.
class Polynomial {
 public:
  Polynomial() : coef_(Eigen::VectorXd::Zero(1)) {}
  explicit Polynomial(Eigen::VectorXd coef);

  double operator()(double x) const;
  Polynomial derivative() const;
  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  const Eigen::VectorXd& coefficients() const { return coef_; }

 private:
  Eigen::VectorXd coef_;
};

enum class BasisFamily { LagrangeGL, HermiteCubic };

// Reference element basis on [-1, 1].
//
// LagrangeGL: degree-p nodal basis at the p+1 Gauss-Lobatto points.
// HermiteCubic: C^1 basis with dofs [value_left, slope_left,
// value_right, slope_right]; slopes are taken with respect to the
// reference coordinate.
class ReferenceBasis {
 public:
  // Empty basis; assign one of the factory results before use.
  ReferenceBasis() = default;

  static ReferenceBasis lagrange_gl(int p);
  static ReferenceBasis hermite_cubic();

  BasisFamily family() const { return family_; }
  int degree() const { return degree_; }
  int continuity() const { return continuity_; }
  int size() const { return static_cast<int>(funcs_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }

  // deriv-th derivative of basis function `func` at reference point xi.
  double eval(int func, int deriv, double xi) const;

 private:
  BasisFamily family_ = BasisFamily::LagrangeGL;
  int degree_ = 1;
  int continuity_ = 0;
  Eigen::VectorXd nodes_;
  std::vector<std::vector<Polynomial>> funcs_;  // funcs_[i][d] = d-th derivative
};

// W^{m-k,inf}(tau) norms of the shape functions attached to the
// endpoint of a width-h cell that meets the transition point.  For
// m = 1 there is one such function (the nodal hat), for m = 2 two
// (value and slope, the slope dof scaled to a unit physical
// derivative).  Entry n holds the norm of the function whose nodal
// data is the n-th derivative.
Eigen::VectorXd hermite_transition_norms(int m, int k, double h);

}  // namespace spfem
