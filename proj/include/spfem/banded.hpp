#pragma once

#include <span>

#include <Eigen/Core>

namespace spfem {

// Symmetric band matrix, lower triangle stored packed: entry (r, j)
// of the storage block holds A(j + r, j) for r <= bandwidth.
class BandMatrix {
 public:
  BandMatrix(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  // Lower-triangle accessor, requires j <= i <= j + bandwidth.
  double& at(int i, int j);
  // Symmetric read of any in-band entry; zero outside the band.
  double get(int i, int j) const;
  void add(int i, int j, double v);

  BandMatrix& axpy(double a, const BandMatrix& other);
  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

 private:
  int n_;
  int bw_;
  Eigen::MatrixXd store_;  // (bw + 1) x n
};

struct BandedSystem {
  BandMatrix matrix;
  Eigen::VectorXd rhs;
};

// Cholesky factorization preserving the band. Throws NotSPD when a
// pivot fails to be positive.
class BandCholesky {
 public:
  explicit BandCholesky(const BandMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  int n_;
  int bw_;
  Eigen::MatrixXd l_;  // same packed layout as BandMatrix
};

// Factor, solve and verify the relative max-norm residual is below
// 1e-10; throws ResidualTooLarge otherwise.
Eigen::VectorXd solve(const BandedSystem& sys);

// Symmetric elimination of Dirichlet dofs: moves columns to the right
// hand side, zeroes the rows and columns and pins the dof values.
void apply_dirichlet(BandMatrix& a, Eigen::VectorXd& b, std::span<const int> dofs,
                     std::span<const double> values);

}  // namespace spfem
