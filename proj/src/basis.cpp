#include "spfem/basis.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "spfem/error.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

Polynomial::Polynomial(Eigen::VectorXd coef) : coef_(std::move(coef)) {
  if (coef_.size() == 0) coef_ = Eigen::VectorXd::Zero(1);
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (Eigen::Index i = coef_.size() - 1; i >= 0; --i) v = v * x + coef_[i];
  return v;
}

Polynomial Polynomial::derivative() const {
  if (coef_.size() <= 1) return Polynomial(Eigen::VectorXd::Zero(1));
  Eigen::VectorXd d(coef_.size() - 1);
  for (Eigen::Index i = 1; i < coef_.size(); ++i) d[i - 1] = i * coef_[i];
  return Polynomial(std::move(d));
}

namespace {

constexpr int kStoredDerivatives = 4;

std::vector<Polynomial> with_derivatives(Polynomial p) {
  std::vector<Polynomial> out;
  out.reserve(kStoredDerivatives + 1);
  out.push_back(std::move(p));
  for (int d = 0; d < kStoredDerivatives; ++d) out.push_back(out.back().derivative());
  return out;
}

}  // namespace

ReferenceBasis ReferenceBasis::lagrange_gl(int p) {
  if (p < 1) fail(Errc::UnsupportedOrder, "lagrange_gl needs degree >= 1");

  ReferenceBasis b;
  b.family_ = BasisFamily::LagrangeGL;
  b.degree_ = p;
  b.continuity_ = 0;
  b.nodes_ = gauss_lobatto(p + 1).points;

  // Coefficients from the Vandermonde system V a_j = e_j.
  const int n = p + 1;
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int k = 0; k < n; ++k) {
      v(i, k) = pw;
      pw *= b.nodes_[i];
    }
  }
  Eigen::MatrixXd coef = v.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  for (int j = 0; j < n; ++j) b.funcs_.push_back(with_derivatives(Polynomial(coef.col(j))));
  return b;
}

ReferenceBasis ReferenceBasis::hermite_cubic() {
  ReferenceBasis b;
  b.family_ = BasisFamily::HermiteCubic;
  b.degree_ = 3;
  b.continuity_ = 1;
  b.nodes_ = Eigen::Vector2d(-1.0, 1.0);

  auto poly = [](double c0, double c1, double c2, double c3) {
    return Polynomial(Eigen::Vector4d(c0, c1, c2, c3));
  };
  // value_left  = (2 - 3 xi + xi^3) / 4
  // slope_left  = (1 - xi - xi^2 + xi^3) / 4
  // value_right = (2 + 3 xi - xi^3) / 4
  // slope_right = (-1 - xi + xi^2 + xi^3) / 4
  b.funcs_.push_back(with_derivatives(poly(0.5, -0.75, 0.0, 0.25)));
  b.funcs_.push_back(with_derivatives(poly(0.25, -0.25, -0.25, 0.25)));
  b.funcs_.push_back(with_derivatives(poly(0.5, 0.75, 0.0, -0.25)));
  b.funcs_.push_back(with_derivatives(poly(-0.25, -0.25, 0.25, 0.25)));
  return b;
}

double ReferenceBasis::eval(int func, int deriv, double xi) const {
  if (func < 0 || func >= size()) fail(Errc::IndexOutOfRange, "basis function index");
  if (deriv < 0 || deriv > kStoredDerivatives)
    fail(Errc::UnsupportedOrder, "basis derivative order");
  return funcs_[func][deriv](xi);
}

Eigen::VectorXd hermite_transition_norms(int m, int k, double h) {
  if (m < 1 || m > 2 || k < 1 || k > m)
    fail(Errc::UnsupportedOrder, "transition norms defined for 1 <= k <= m <= 2");
  if (!(h > 0.0)) fail(Errc::BadGeneratingFunction, "cell width must be positive");

  // Shape functions attached to the right endpoint of the cell, with
  // the slope dof normalized to unit physical derivative.
  ReferenceBasis basis =
      m == 2 ? ReferenceBasis::hermite_cubic() : ReferenceBasis::lagrange_gl(1);
  std::vector<std::pair<int, double>> shape;  // (function index, dof scale)
  if (m == 2) {
    shape.emplace_back(2, 1.0);      // value at the transition node
    shape.emplace_back(3, h / 2.0);  // slope dof carries physical derivative
  } else {
    shape.emplace_back(1, 1.0);
  }

  const int sup_order = m - k;
  const int samples = 2001;
  Eigen::VectorXd norms(m);
  for (int n = 0; n < m; ++n) {
    double best = 0.0;
    for (int d = 0; d <= sup_order; ++d) {
      double scale = shape[n].second * std::pow(2.0 / h, d);
      for (int s = 0; s < samples; ++s) {
        double xi = -1.0 + 2.0 * s / (samples - 1);
        best = std::max(best, std::abs(scale * basis.eval(shape[n].first, d, xi)));
      }
    }
    norms[n] = best;
  }
  return norms;
}

}  // namespace spfem
