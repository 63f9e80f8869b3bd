#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "spfem/banded.hpp"
#include "spfem/basis.hpp"
#include "spfem/field.hpp"
#include "spfem/mesh.hpp"
#include "spfem/problems.hpp"

namespace spfem {

// Global numbering of the tensor-product dofs on a Grid.
//
// LagrangeGL: one dof per global interpolation node, p per cell plus
// the closing node; 2D numbering is x-fastest.
// HermiteCubic (1D): two dofs per mesh node, value then slope; slope
// dofs carry the physical derivative.
struct DofMap {
  BasisFamily family = BasisFamily::LagrangeGL;
  int degree = 1;
  int dim = 1;
  int nodes_x = 0;  // global interpolation nodes per direction
  int nodes_y = 0;
  int n_dofs = 0;
  int bandwidth = 0;
  Eigen::VectorXd coords_x;  // node coordinates (LagrangeGL)
  Eigen::VectorXd coords_y;
  std::vector<int> boundary;  // dofs pinned by the essential conditions

  void cell_dofs(int cx, std::vector<int>& out) const;
  void cell_dofs(int cx, int cy, std::vector<int>& out) const;
};

// constrain_order 0 leaves the space unconstrained; order m pins the
// dofs fixing derivatives 0..m-1 on the boundary.
DofMap make_dofmap(const Grid& grid, const ReferenceBasis& basis, int constrain_order);

// Piecewise-polynomial function over a grid, evaluated through the
// reference basis.
class DiscreteFunction {
 public:
  DiscreteFunction() = default;
  DiscreteFunction(Grid grid, ReferenceBasis basis, DofMap dofs, Eigen::VectorXd coeffs);

  const Grid& grid() const { return grid_; }
  const ReferenceBasis& basis() const { return basis_; }
  const DofMap& dofs() const { return dofs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double eval(double x, int deriv = 0) const;
  double eval(double x, double y, int dx, int dy) const;

  // One-sided evaluation on a chosen cell; x may be a cell endpoint.
  double eval_on_cell(int cx, int deriv, double x) const;
  double eval_on_cell(int cx, int cy, int dx, int dy, double x, double y) const;

  Field as_field() const;

 private:
  Grid grid_;
  ReferenceBasis basis_;
  DofMap dofs_;
  Eigen::VectorXd coeffs_;
};

// Stiffness blocks kept separate so one assembly serves every eps
// scaling: full matrix is eps^{2k} * principal + lower.
struct AssembledSystem {
  BandMatrix principal;
  BandMatrix lower;
  Eigen::VectorXd load;
  DofMap dofs;
};

AssembledSystem assemble(const ProblemSpec& spec, const STypeMesh& mesh,
                         const ReferenceBasis& basis, int quad_points = 0);

BandedSystem constrained_system(const AssembledSystem& sys, double epsilon, int k);

DiscreteFunction galerkin_solve(const ProblemSpec& spec, const STypeMesh& mesh,
                                const ReferenceBasis& basis, int quad_points = 0);

// Default quadrature point count per direction for degree-p spaces.
inline int default_quad_points(int p) { return std::max(p + 2, 6); }

}  // namespace spfem
