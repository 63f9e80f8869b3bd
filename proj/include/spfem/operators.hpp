#pragma once

#include <vector>

#include <Eigen/Core>

#include "spfem/fem.hpp"
#include "spfem/mesh.hpp"
#include "spfem/problems.hpp"

namespace spfem {

// Nodal interpolant into the Lagrange space over the whole mesh.
DiscreteFunction interpolate_gl(const Field& u, const STypeMesh& mesh,
                                const ReferenceBasis& basis);

// Hermite interpolant matching values and first derivatives at the
// mesh nodes (1D).
DiscreteFunction interpolate_hermite(const Field& u, const STypeMesh& mesh);

// Grid made of the coarse interior cells (lambda, 1 - lambda)^dim.
Grid coarse_subgrid(const STypeMesh& mesh);

// c-weighted L2 projection onto the discrete space over the coarse
// cells: (c (v - Pv), w) = 0 for all w there.
DiscreteFunction weighted_l2_projection(const Field& v, const STypeMesh& mesh, const Field& c,
                                        const ReferenceBasis& basis, int quad_points = 0);

// Projection orthogonal in the lower-order form over the coarse
// cells, with derivatives of orders 0..m-k-1 of the defect pinned to
// zero on the boundary of the coarse region.  Defined for m = 2.
DiscreteFunction ritz_projection(const Field& v, const STypeMesh& mesh, LowerForm lower_form,
                                 int m, int k, int quad_points = 0);

// Local nodal indicator of the transition boundary on a ply cell:
// coefficient 1 at the basis nodes lying on the boundary of the
// coarse region, 0 elsewhere.
struct NodalIndicator {
  int cell_x = 0;
  int cell_y = -1;
  Eigen::VectorXd coeffs;
};

NodalIndicator chi_tau(const STypeMesh& mesh, const ReferenceBasis& basis, int cx, int cy = -1);

struct OperatorOutput {
  DiscreteFunction result;
  std::vector<CellClass> region_tags;  // per cell, row-major in 2D
};

// Piecewise quasi-interpolant: projection of the smooth part (and
// zero for the layers) on coarse cells, nodal interpolation on layer
// cells, and a conforming blend across the ply rim.
OperatorOutput hybrid_interpolant(const Problem& problem, const STypeMesh& mesh,
                                  const ReferenceBasis& basis, int quad_points = 0);

// Same with explicit parts; `layer` may be a zero field to study the
// smooth component alone (and vice versa).
OperatorOutput hybrid_parts(const Field& smooth, const Field& layer, const STypeMesh& mesh,
                            const ReferenceBasis& basis, int m, int k, LowerForm lower_form,
                            const Field& c, int quad_points = 0);

}  // namespace spfem
