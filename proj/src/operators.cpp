#include "spfem/operators.hpp"

#include <algorithm>
#include <cmath>

#include "spfem/banded.hpp"
#include "spfem/error.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

DiscreteFunction interpolate_gl(const Field& u, const STypeMesh& mesh,
                                const ReferenceBasis& basis) {
  if (basis.family() != BasisFamily::LagrangeGL)
    fail(Errc::IncompatibleBasis, "nodal interpolation needs the Lagrange basis");
  if (u.dim() != mesh.dim) fail(Errc::RegionMeshMismatch, "field/mesh dimension mismatch");

  DofMap dofs = make_dofmap(mesh.grid, basis, 0);
  Eigen::VectorXd coef(dofs.n_dofs);
  if (mesh.dim == 1) {
    for (int i = 0; i < dofs.nodes_x; ++i) coef[i] = u(dofs.coords_x[i], 0);
  } else {
    for (int iy = 0; iy < dofs.nodes_y; ++iy)
      for (int ix = 0; ix < dofs.nodes_x; ++ix)
        coef[iy * dofs.nodes_x + ix] = u(dofs.coords_x[ix], dofs.coords_y[iy], 0, 0);
  }
  return DiscreteFunction(mesh.grid, basis, dofs, std::move(coef));
}

DiscreteFunction interpolate_hermite(const Field& u, const STypeMesh& mesh) {
  if (mesh.dim != 1) fail(Errc::UnsupportedOrder, "Hermite interpolation is 1D");
  if (u.dim() != 1) fail(Errc::RegionMeshMismatch, "field/mesh dimension mismatch");
  if (u.max_derivative() < 1)
    fail(Errc::MissingDerivative, "Hermite interpolation needs first derivatives");

  ReferenceBasis basis = ReferenceBasis::hermite_cubic();
  DofMap dofs = make_dofmap(mesh.grid, basis, 0);
  Eigen::VectorXd coef(dofs.n_dofs);
  for (int i = 0; i < dofs.nodes_x; ++i) {
    coef[2 * i] = u(mesh.grid.x[i], 0);
    coef[2 * i + 1] = u(mesh.grid.x[i], 1);
  }
  return DiscreteFunction(mesh.grid, basis, dofs, std::move(coef));
}

Grid coarse_subgrid(const STypeMesh& mesh) {
  const int n = mesh.n();
  Grid g;
  g.dim = mesh.dim;
  g.x = mesh.grid.x.segment(n / 4, n / 2 + 1);
  if (mesh.dim == 2) g.y = g.x;
  return g;
}

DiscreteFunction weighted_l2_projection(const Field& v, const STypeMesh& mesh, const Field& c,
                                        const ReferenceBasis& basis, int quad_points) {
  if (basis.family() != BasisFamily::LagrangeGL)
    fail(Errc::IncompatibleBasis, "the weighted projection uses the Lagrange space");
  if (v.dim() != mesh.dim || c.dim() != mesh.dim)
    fail(Errc::RegionMeshMismatch, "field/mesh dimension mismatch");

  Grid sub = coarse_subgrid(mesh);
  DofMap dofs = make_dofmap(sub, basis, 0);
  const int nq = quad_points > 0 ? quad_points : default_quad_points(basis.degree());
  QuadratureRule rule = gauss_legendre(nq);

  BandMatrix mass(dofs.n_dofs, dofs.bandwidth);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_dofs);
  const int p = basis.degree();

  Eigen::MatrixXd b0(p + 1, rule.points.size());
  for (int a = 0; a <= p; ++a)
    for (Eigen::Index q = 0; q < rule.points.size(); ++q)
      b0(a, q) = basis.eval(a, 0, rule.points[q]);

  if (mesh.dim == 1) {
    std::vector<int> cell;
    for (int cx = 0; cx < sub.cells_x(); ++cx) {
      const double xl = sub.x[cx], xr = sub.x[cx + 1];
      const double h = xr - xl;
      dofs.cell_dofs(cx, cell);
      for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
        const double x = 0.5 * ((1.0 - rule.points[q]) * xl + (1.0 + rule.points[q]) * xr);
        const double w = rule.weights[q] * 0.5 * h * c(x, 0);
        for (int a = 0; a <= p; ++a) {
          rhs[cell[a]] += w * v(x, 0) * b0(a, q);
          for (int b = 0; b <= a; ++b) mass.add(cell[a], cell[b], w * b0(a, q) * b0(b, q));
        }
      }
    }
  } else {
    std::vector<int> cell;
    for (int cy = 0; cy < sub.cells_y(); ++cy) {
      const double yl = sub.y[cy], yr = sub.y[cy + 1];
      for (int cx = 0; cx < sub.cells_x(); ++cx) {
        const double xl = sub.x[cx], xr = sub.x[cx + 1];
        dofs.cell_dofs(cx, cy, cell);
        for (Eigen::Index qy = 0; qy < rule.points.size(); ++qy) {
          const double y = 0.5 * ((1.0 - rule.points[qy]) * yl + (1.0 + rule.points[qy]) * yr);
          for (Eigen::Index qx = 0; qx < rule.points.size(); ++qx) {
            const double x = 0.5 * ((1.0 - rule.points[qx]) * xl + (1.0 + rule.points[qx]) * xr);
            const double w = rule.weights[qx] * rule.weights[qy] * 0.25 * (xr - xl) * (yr - yl) *
                             c(x, y, 0, 0);
            const double vv = v(x, y, 0, 0);
            // cell[] is strictly increasing in the local index, so the
            // lower-triangle loop hits each global pair once.
            for (int b = 0; b <= p; ++b) {
              for (int a = 0; a <= p; ++a) {
                const int i = a + b * (p + 1);
                const double gi = b0(a, qx) * b0(b, qy);
                rhs[cell[i]] += w * vv * gi;
                for (int j = 0; j <= i; ++j) {
                  const double gj = b0(j % (p + 1), qx) * b0(j / (p + 1), qy);
                  mass.add(cell[i], cell[j], w * gi * gj);
                }
              }
            }
          }
        }
      }
    }
  }

  BandCholesky chol(mass);
  return DiscreteFunction(sub, basis, dofs, chol.solve(rhs));
}

DiscreteFunction ritz_projection(const Field& v, const STypeMesh& mesh, LowerForm lower_form,
                                 int m, int k, int quad_points) {
  if (m != 2 || (k != 1 && k != 2))
    fail(Errc::UnsupportedOrder, "the projection is defined for m = 2, k = 1 or 2");
  if (mesh.dim != 1) fail(Errc::UnsupportedOrder, "fourth-order projections are 1D");
  if (v.dim() != 1) fail(Errc::RegionMeshMismatch, "field/mesh dimension mismatch");
  if (lower_form == LowerForm::GradGrad && v.max_derivative() < 1)
    fail(Errc::MissingDerivative, "gradient form needs first derivatives of the input");

  Grid sub = coarse_subgrid(mesh);
  ReferenceBasis basis = ReferenceBasis::hermite_cubic();
  DofMap dofs = make_dofmap(sub, basis, 0);
  const int nq = quad_points > 0 ? quad_points : default_quad_points(basis.degree());
  QuadratureRule rule = gauss_legendre(nq);

  const int d = lower_form == LowerForm::GradGrad ? 1 : 0;
  BandMatrix a(dofs.n_dofs, dofs.bandwidth);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_dofs);

  std::vector<int> cell;
  for (int cx = 0; cx < sub.cells_x(); ++cx) {
    const double xl = sub.x[cx], xr = sub.x[cx + 1];
    const double h = xr - xl;
    const double jac = std::pow(2.0 / h, d);
    dofs.cell_dofs(cx, cell);
    for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
      const double x = 0.5 * ((1.0 - rule.points[q]) * xl + (1.0 + rule.points[q]) * xr);
      const double w = rule.weights[q] * 0.5 * h;
      const double vq = v(x, d);
      for (size_t ai = 0; ai < cell.size(); ++ai) {
        double ga = basis.eval(static_cast<int>(ai), d, rule.points[q]) * jac;
        if (ai % 2 == 1) ga *= 0.5 * h;
        rhs[cell[ai]] += w * vq * ga;
        for (size_t bi = 0; bi <= ai; ++bi) {
          double gb = basis.eval(static_cast<int>(bi), d, rule.points[q]) * jac;
          if (bi % 2 == 1) gb *= 0.5 * h;
          a.add(cell[ai], cell[bi], w * ga * gb);
        }
      }
    }
  }

  if (m - k - 1 >= 0) {
    // Pin the value dofs at the ends of the coarse region.
    std::vector<int> pins = {0, 2 * sub.cells_x()};
    std::vector<double> vals = {v(sub.x[0], 0), v(sub.x[sub.cells_x()], 0)};
    apply_dirichlet(a, rhs, pins, vals);
  }

  BandCholesky chol(a);
  return DiscreteFunction(sub, basis, dofs, chol.solve(rhs));
}

namespace {

// Whether local Lagrange node `a` of 1D cell cx sits exactly on the
// transition point of a ply cell.
bool at_transition(const STypeMesh& mesh, int cx, int a, int p) {
  const int n = mesh.n();
  if (cx == n / 4 - 1) return a == p;
  if (cx == 3 * n / 4) return a == 0;
  return false;
}

// Whether the node lies in the closed coarse range along a direction.
bool in_coarse_closure(const STypeMesh& mesh, int cx, int a, int p) {
  const int n = mesh.n();
  const int g = cx * p + a;
  return g >= n / 4 * p && g <= 3 * n / 4 * p;
}

}  // namespace

NodalIndicator chi_tau(const STypeMesh& mesh, const ReferenceBasis& basis, int cx, int cy) {
  if (basis.family() != BasisFamily::LagrangeGL)
    fail(Errc::IncompatibleBasis, "the nodal indicator uses the Lagrange basis");
  const int p = basis.degree();

  NodalIndicator ind;
  ind.cell_x = cx;
  ind.cell_y = cy;

  if (mesh.dim == 1) {
    if (classify_cell(mesh, cx) != CellClass::Ply) fail(Errc::NotPlyCell, "not a ply cell");
    ind.coeffs = Eigen::VectorXd::Zero(p + 1);
    for (int a = 0; a <= p; ++a)
      if (at_transition(mesh, cx, a, p)) ind.coeffs[a] = 1.0;
    return ind;
  }

  if (cy < 0) fail(Errc::RegionMeshMismatch, "2D mesh needs two cell indices");
  if (classify_cell(mesh, cx, cy) != CellClass::Ply) fail(Errc::NotPlyCell, "not a ply cell");
  ind.coeffs = Eigen::VectorXd::Zero((p + 1) * (p + 1));
  for (int b = 0; b <= p; ++b) {
    for (int a = 0; a <= p; ++a) {
      bool on = (at_transition(mesh, cx, a, p) && in_coarse_closure(mesh, cy, b, p)) ||
                (at_transition(mesh, cy, b, p) && in_coarse_closure(mesh, cx, a, p));
      if (on) ind.coeffs[a + b * (p + 1)] = 1.0;
    }
  }
  return ind;
}

namespace {

OperatorOutput hybrid_first_order(const Field& smooth, const Field& layer, const STypeMesh& mesh,
                                  const ReferenceBasis& basis, const Field& c, int quad_points) {
  Field total = smooth + layer;
  DiscreteFunction proj = weighted_l2_projection(smooth, mesh, c, basis, quad_points);
  DofMap dofs = make_dofmap(mesh.grid, basis, 0);
  Eigen::VectorXd coef(dofs.n_dofs);

  const int p = basis.degree();
  const int n = mesh.n();
  const int off = n / 4 * p;  // first coarse-region node per direction

  if (mesh.dim == 1) {
    auto node_value = [&](int g) {
      // Nodes strictly inside the coarse region, and the transition
      // nodes themselves, take the projected smooth part; all other
      // nodes interpolate.
      if (g >= off && g <= 3 * n / 4 * p) return proj.coeffs()[g - off];
      return total(dofs.coords_x[g], 0);
    };
    for (int g = 0; g < dofs.n_dofs; ++g) coef[g] = node_value(g);
  } else {
    const int sub_nodes = n / 2 * p + 1;
    for (int iy = 0; iy < dofs.nodes_y; ++iy) {
      for (int ix = 0; ix < dofs.nodes_x; ++ix) {
        bool cx_in = ix >= off && ix <= 3 * n / 4 * p;
        bool cy_in = iy >= off && iy <= 3 * n / 4 * p;
        if (cx_in && cy_in)
          coef[iy * dofs.nodes_x + ix] = proj.coeffs()[(iy - off) * sub_nodes + (ix - off)];
        else
          coef[iy * dofs.nodes_x + ix] = total(dofs.coords_x[ix], dofs.coords_y[iy], 0, 0);
      }
    }
  }

  OperatorOutput out{DiscreteFunction(mesh.grid, basis, dofs, std::move(coef)), {}};
  if (mesh.dim == 1) {
    for (int cx = 0; cx < n; ++cx) out.region_tags.push_back(classify_cell(mesh, cx));
  } else {
    for (int cy = 0; cy < n; ++cy)
      for (int cx = 0; cx < n; ++cx) out.region_tags.push_back(classify_cell(mesh, cx, cy));
  }
  return out;
}

OperatorOutput hybrid_second_order(const Field& smooth, const Field& layer, const STypeMesh& mesh,
                                   int k, LowerForm lower_form, int quad_points) {
  Field total = smooth + layer;
  DiscreteFunction proj = ritz_projection(smooth, mesh, lower_form, 2, k, quad_points);
  ReferenceBasis basis = ReferenceBasis::hermite_cubic();
  DofMap dofs = make_dofmap(mesh.grid, basis, 0);
  Eigen::VectorXd coef(dofs.n_dofs);

  const int n = mesh.n();
  for (int i = 0; i <= n; ++i) {
    if (i >= n / 4 && i <= 3 * n / 4) {
      coef[2 * i] = proj.coeffs()[2 * (i - n / 4)];
      coef[2 * i + 1] = proj.coeffs()[2 * (i - n / 4) + 1];
    } else {
      coef[2 * i] = total(mesh.grid.x[i], 0);
      coef[2 * i + 1] = total(mesh.grid.x[i], 1);
    }
  }

  OperatorOutput out{DiscreteFunction(mesh.grid, basis, dofs, std::move(coef)), {}};
  for (int cx = 0; cx < n; ++cx) out.region_tags.push_back(classify_cell(mesh, cx));
  return out;
}

}  // namespace

OperatorOutput hybrid_parts(const Field& smooth, const Field& layer, const STypeMesh& mesh,
                            const ReferenceBasis& basis, int m, int k, LowerForm lower_form,
                            const Field& c, int quad_points) {
  if (!smooth.valid() || !layer.valid())
    fail(Errc::MissingDecomposition, "the operator needs smooth and layer parts");
  if (m == 1) {
    if (basis.family() != BasisFamily::LagrangeGL)
      fail(Errc::IncompatibleBasis, "second-order problems use the Lagrange space");
    return hybrid_first_order(smooth, layer, mesh, basis, c, quad_points);
  }
  if (m == 2) {
    if (basis.family() != BasisFamily::HermiteCubic)
      fail(Errc::IncompatibleBasis, "fourth-order problems use the Hermite space");
    return hybrid_second_order(smooth, layer, mesh, k, lower_form, quad_points);
  }
  fail(Errc::UnsupportedOrder, "hybrid operator defined for m = 1 or 2");
}

OperatorOutput hybrid_interpolant(const Problem& problem, const STypeMesh& mesh,
                                  const ReferenceBasis& basis, int quad_points) {
  const SolutionDecomposition& dec = problem.decomposition;
  if (!dec.smooth.valid() || !dec.exact.valid())
    fail(Errc::MissingDecomposition, "problem lacks a solution decomposition");

  std::vector<Field> layer_parts = dec.layers;
  for (const Field& f : dec.corners) layer_parts.push_back(f);
  Field layer = layer_parts.empty() ? Field::zero(mesh.dim) : field_sum(layer_parts);
  return hybrid_parts(dec.smooth, layer, mesh, basis, problem.spec.m, problem.spec.k,
                      problem.spec.lower_form, problem.spec.c, quad_points);
}

}  // namespace spfem
