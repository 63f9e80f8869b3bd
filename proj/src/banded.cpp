#include "spfem/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spfem/error.hpp"

namespace spfem {

BandMatrix::BandMatrix(int n, int bandwidth) : n_(n), bw_(bandwidth) {
  if (n < 1 || bandwidth < 0 || bandwidth >= n + 1)
    fail(Errc::BadConfig, "band matrix needs n >= 1 and 0 <= bandwidth <= n - 1");
  store_ = Eigen::MatrixXd::Zero(bw_ + 1, n_);
}

double& BandMatrix::at(int i, int j) {
  if (j > i || i - j > bw_ || i >= n_ || j < 0)
    fail(Errc::IndexOutOfRange, "band matrix entry outside the stored band");
  return store_(i - j, j);
}

double BandMatrix::get(int i, int j) const {
  if (i < j) std::swap(i, j);
  if (j < 0 || i >= n_) fail(Errc::IndexOutOfRange, "band matrix index");
  if (i - j > bw_) return 0.0;
  return store_(i - j, j);
}

void BandMatrix::add(int i, int j, double v) {
  if (i < j) std::swap(i, j);
  at(i, j) += v;
}

BandMatrix& BandMatrix::axpy(double a, const BandMatrix& other) {
  if (other.n_ != n_ || other.bw_ > bw_)
    fail(Errc::BadConfig, "band matrix sum needs matching size and enclosing band");
  store_.topRows(other.bw_ + 1) += a * other.store_;
  return *this;
}

Eigen::VectorXd BandMatrix::multiply(const Eigen::VectorXd& v) const {
  if (v.size() != n_) fail(Errc::BadConfig, "band matrix-vector size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    out[j] += store_(0, j) * v[j];
    int top = std::min(bw_, n_ - 1 - j);
    for (int r = 1; r <= top; ++r) {
      out[j + r] += store_(r, j) * v[j];
      out[j] += store_(r, j) * v[j + r];
    }
  }
  return out;
}

Eigen::MatrixXd BandMatrix::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    int top = std::min(bw_, n_ - 1 - j);
    for (int r = 0; r <= top; ++r) {
      d(j + r, j) = store_(r, j);
      d(j, j + r) = store_(r, j);
    }
  }
  return d;
}

BandCholesky::BandCholesky(const BandMatrix& a) : n_(a.size()), bw_(a.bandwidth()) {
  l_ = Eigen::MatrixXd::Zero(bw_ + 1, n_);
  for (int j = 0; j < n_; ++j) {
    double s = a.get(j, j);
    for (int k = std::max(0, j - bw_); k < j; ++k) {
      double ljk = l_(j - k, k);
      s -= ljk * ljk;
    }
    if (!(s > 0.0) || !std::isfinite(s))
      fail(Errc::NotSPD, "nonpositive pivot at column " + std::to_string(j));
    double ljj = std::sqrt(s);
    l_(0, j) = ljj;
    int top = std::min(n_ - 1, j + bw_);
    for (int i = j + 1; i <= top; ++i) {
      double t = a.get(i, j);
      for (int k = std::max(0, i - bw_); k < j; ++k) t -= l_(i - k, k) * l_(j - k, k);
      l_(i - j, j) = t / ljj;
    }
  }
}

Eigen::VectorXd BandCholesky::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) fail(Errc::BadConfig, "solve size mismatch");
  Eigen::VectorXd y(n_);
  for (int i = 0; i < n_; ++i) {
    double s = b[i];
    for (int k = std::max(0, i - bw_); k < i; ++k) s -= l_(i - k, k) * y[k];
    y[i] = s / l_(0, i);
  }
  Eigen::VectorXd x(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    double s = y[i];
    int top = std::min(n_ - 1, i + bw_);
    for (int k = i + 1; k <= top; ++k) s -= l_(k - i, i) * x[k];
    x[i] = s / l_(0, i);
  }
  return x;
}

Eigen::VectorXd solve(const BandedSystem& sys) {
  BandCholesky chol(sys.matrix);
  Eigen::VectorXd x = chol.solve(sys.rhs);
  Eigen::VectorXd r = sys.matrix.multiply(x) - sys.rhs;
  double denom = sys.rhs.lpNorm<Eigen::Infinity>();
  if (denom == 0.0) denom = 1.0;
  double rel = r.lpNorm<Eigen::Infinity>() / denom;
  if (!(rel <= 1e-10))
    fail(Errc::ResidualTooLarge, "relative residual " + std::to_string(rel));
  return x;
}

void apply_dirichlet(BandMatrix& a, Eigen::VectorXd& b, std::span<const int> dofs,
                     std::span<const double> values) {
  if (dofs.size() != values.size()) fail(Errc::BadConfig, "dof/value count mismatch");
  const int n = a.size();
  const int bw = a.bandwidth();

  std::vector<char> constrained(n, 0);
  for (size_t s = 0; s < dofs.size(); ++s) {
    int d = dofs[s];
    if (d < 0 || d >= n) fail(Errc::IndexOutOfRange, "dirichlet dof");
    constrained[d] = 1;
  }

  // Move known columns to the right hand side first, against the
  // untouched matrix, then clear rows and columns.
  for (size_t s = 0; s < dofs.size(); ++s) {
    int d = dofs[s];
    double v = values[s];
    for (int i = std::max(0, d - bw); i <= std::min(n - 1, d + bw); ++i)
      if (!constrained[i]) b[i] -= a.get(i, d) * v;
  }
  for (size_t s = 0; s < dofs.size(); ++s) {
    int d = dofs[s];
    for (int i = std::max(0, d - bw); i <= std::min(n - 1, d + bw); ++i) {
      if (i == d) continue;
      if (i > d)
        a.at(i, d) = 0.0;
      else
        a.at(d, i) = 0.0;
    }
    a.at(d, d) = 1.0;
    b[d] = values[s];
  }
}

}  // namespace spfem
