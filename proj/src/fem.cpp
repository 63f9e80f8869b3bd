#include "spfem/fem.hpp"

#include <algorithm>
#include <cmath>

#include "spfem/error.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

namespace {

// Nodes of the degree-p Lagrange space along one direction.
Eigen::VectorXd direction_nodes(const Eigen::VectorXd& x, const Eigen::VectorXd& ref_nodes,
                                int p) {
  const int cells = static_cast<int>(x.size()) - 1;
  Eigen::VectorXd out(cells * p + 1);
  for (int c = 0; c < cells; ++c) {
    for (int a = 0; a < p; ++a) {
      double xi = ref_nodes[a];
      out[c * p + a] = 0.5 * ((1.0 - xi) * x[c] + (1.0 + xi) * x[c + 1]);
    }
  }
  out[cells * p] = x[cells];
  return out;
}

}  // namespace

void DofMap::cell_dofs(int cx, std::vector<int>& out) const {
  if (family == BasisFamily::HermiteCubic) {
    out = {2 * cx, 2 * cx + 1, 2 * cx + 2, 2 * cx + 3};
  } else {
    out.resize(degree + 1);
    for (int a = 0; a <= degree; ++a) out[a] = cx * degree + a;
  }
}

void DofMap::cell_dofs(int cx, int cy, std::vector<int>& out) const {
  const int p = degree;
  out.resize((p + 1) * (p + 1));
  for (int b = 0; b <= p; ++b)
    for (int a = 0; a <= p; ++a)
      out[a + b * (p + 1)] = (cy * p + b) * nodes_x + cx * p + a;
}

DofMap make_dofmap(const Grid& grid, const ReferenceBasis& basis, int constrain_order) {
  DofMap map;
  map.family = basis.family();
  map.degree = basis.degree();
  map.dim = grid.dim;

  if (basis.family() == BasisFamily::HermiteCubic) {
    if (grid.dim != 1) fail(Errc::UnsupportedOrder, "Hermite spaces are one-dimensional here");
    const int nn = static_cast<int>(grid.x.size());
    map.nodes_x = nn;
    map.n_dofs = 2 * nn;
    map.bandwidth = 3;
    map.coords_x = grid.x;
    if (constrain_order >= 1) {
      map.boundary.push_back(0);
      map.boundary.push_back(2 * (nn - 1));
    }
    if (constrain_order >= 2) {
      map.boundary.push_back(1);
      map.boundary.push_back(2 * (nn - 1) + 1);
    }
    std::sort(map.boundary.begin(), map.boundary.end());
    return map;
  }

  const int p = basis.degree();
  map.coords_x = direction_nodes(grid.x, basis.nodes(), p);
  map.nodes_x = static_cast<int>(map.coords_x.size());
  if (grid.dim == 1) {
    map.n_dofs = map.nodes_x;
    map.bandwidth = p;
    if (constrain_order >= 1) map.boundary = {0, map.nodes_x - 1};
    if (constrain_order >= 2)
      fail(Errc::IncompatibleBasis, "Lagrange spaces cannot pin boundary derivatives");
  } else {
    map.coords_y = direction_nodes(grid.y, basis.nodes(), p);
    map.nodes_y = static_cast<int>(map.coords_y.size());
    map.n_dofs = map.nodes_x * map.nodes_y;
    map.bandwidth = p * map.nodes_x + p;
    if (constrain_order >= 2)
      fail(Errc::IncompatibleBasis, "Lagrange spaces cannot pin boundary derivatives");
    if (constrain_order >= 1) {
      for (int iy = 0; iy < map.nodes_y; ++iy)
        for (int ix = 0; ix < map.nodes_x; ++ix)
          if (ix == 0 || ix == map.nodes_x - 1 || iy == 0 || iy == map.nodes_y - 1)
            map.boundary.push_back(iy * map.nodes_x + ix);
    }
  }
  return map;
}

DiscreteFunction::DiscreteFunction(Grid grid, ReferenceBasis basis, DofMap dofs,
                                   Eigen::VectorXd coeffs)
    : grid_(std::move(grid)),
      basis_(std::move(basis)),
      dofs_(std::move(dofs)),
      coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != dofs_.n_dofs) fail(Errc::BadConfig, "coefficient count mismatch");
}

double DiscreteFunction::eval_on_cell(int cx, int deriv, double x) const {
  if (cx < 0 || cx >= grid_.cells_x()) fail(Errc::IndexOutOfRange, "cell index");
  const double xl = grid_.x[cx];
  const double xr = grid_.x[cx + 1];
  const double h = xr - xl;
  const double xi = (2.0 * x - xl - xr) / h;
  const double jac = std::pow(2.0 / h, deriv);

  std::vector<int> dofs;
  dofs_.cell_dofs(cx, dofs);
  double v = 0.0;
  for (size_t a = 0; a < dofs.size(); ++a) {
    double coef = coeffs_[dofs[a]];
    if (dofs_.family == BasisFamily::HermiteCubic && a % 2 == 1) coef *= 0.5 * h;
    v += coef * basis_.eval(static_cast<int>(a), deriv, xi);
  }
  return v * jac;
}

double DiscreteFunction::eval_on_cell(int cx, int cy, int dx, int dy, double x, double y) const {
  if (cx < 0 || cx >= grid_.cells_x() || cy < 0 || cy >= grid_.cells_y())
    fail(Errc::IndexOutOfRange, "cell index");
  const int p = dofs_.degree;
  const double xl = grid_.x[cx], xr = grid_.x[cx + 1];
  const double yl = grid_.y[cy], yr = grid_.y[cy + 1];
  const double hx = xr - xl, hy = yr - yl;
  const double xi = (2.0 * x - xl - xr) / hx;
  const double eta = (2.0 * y - yl - yr) / hy;
  const double jac = std::pow(2.0 / hx, dx) * std::pow(2.0 / hy, dy);

  std::vector<int> dofs;
  dofs_.cell_dofs(cx, cy, dofs);
  double v = 0.0;
  for (int b = 0; b <= p; ++b) {
    double by = basis_.eval(b, dy, eta);
    for (int a = 0; a <= p; ++a)
      v += coeffs_[dofs[a + b * (p + 1)]] * basis_.eval(a, dx, xi) * by;
  }
  return v * jac;
}

double DiscreteFunction::eval(double x, int deriv) const {
  if (grid_.dim != 1) fail(Errc::RegionMeshMismatch, "1D evaluation of a 2D function");
  return eval_on_cell(grid_.find_cell(grid_.x, x), deriv, x);
}

double DiscreteFunction::eval(double x, double y, int dx, int dy) const {
  if (grid_.dim != 2) fail(Errc::RegionMeshMismatch, "2D evaluation of a 1D function");
  return eval_on_cell(grid_.find_cell(grid_.x, x), grid_.find_cell(grid_.y, y), dx, dy, x, y);
}

Field DiscreteFunction::as_field() const {
  auto self = std::make_shared<DiscreteFunction>(*this);
  if (grid_.dim == 1)
    return Field::analytic([self](double x, int d) { return self->eval(x, d); }, 3);
  return Field::analytic2(
      [self](double x, double y, int dx, int dy) { return self->eval(x, y, dx, dy); }, 3);
}

namespace {

struct Tabulated {
  Eigen::MatrixXd v[3];  // v[d](func, q): d-th reference derivative
};

Tabulated tabulate(const ReferenceBasis& basis, const QuadratureRule& rule, int max_d) {
  Tabulated t;
  const int nq = static_cast<int>(rule.points.size());
  for (int d = 0; d <= max_d; ++d) {
    t.v[d].resize(basis.size(), nq);
    for (int i = 0; i < basis.size(); ++i)
      for (int q = 0; q < nq; ++q) t.v[d](i, q) = basis.eval(i, d, rule.points[q]);
  }
  return t;
}

void check_width(double h) {
  if (!(h > 1e-300)) fail(Errc::QuadratureUnderflow, "degenerate cell width");
}

}  // namespace

AssembledSystem assemble(const ProblemSpec& spec, const STypeMesh& mesh,
                         const ReferenceBasis& basis, int quad_points) {
  if (spec.dim != mesh.dim) fail(Errc::RegionMeshMismatch, "problem/mesh dimension mismatch");
  if (basis.continuity() < spec.m - 1)
    fail(Errc::IncompatibleBasis, "basis continuity too low for the principal order");
  if (spec.m == 2 && mesh.dim != 1)
    fail(Errc::UnsupportedOrder, "fourth-order problems are one-dimensional here");
  if (spec.lower_form == LowerForm::WeightedMass && !spec.c.valid())
    fail(Errc::BadConfig, "weighted mass form needs a reaction coefficient");
  if (!spec.f.valid()) fail(Errc::BadConfig, "missing right-hand side");

  const int nq = quad_points > 0 ? quad_points : default_quad_points(basis.degree());
  QuadratureRule rule = gauss_legendre(nq);
  Tabulated tab = tabulate(basis, rule, spec.m);

  DofMap dofs = make_dofmap(mesh.grid, basis, spec.m);
  AssembledSystem sys{BandMatrix(dofs.n_dofs, dofs.bandwidth),
                      BandMatrix(dofs.n_dofs, dofs.bandwidth),
                      Eigen::VectorXd::Zero(dofs.n_dofs), dofs};

  const int nl = basis.size();
  std::vector<int> cell(nl);
  std::vector<double> scale(nl, 1.0);

  if (mesh.dim == 1) {
    for (int cx = 0; cx < mesh.grid.cells_x(); ++cx) {
      const double xl = mesh.grid.x[cx], xr = mesh.grid.x[cx + 1];
      const double h = xr - xl;
      check_width(h);
      dofs.cell_dofs(cx, cell);
      if (basis.family() == BasisFamily::HermiteCubic)
        for (int a = 1; a < nl; a += 2) scale[a] = 0.5 * h;

      const double jm = std::pow(2.0 / h, spec.m);
      for (int q = 0; q < nq; ++q) {
        const double x = 0.5 * ((1.0 - rule.points[q]) * xl + (1.0 + rule.points[q]) * xr);
        const double w = rule.weights[q] * 0.5 * h;
        double cval = 0.0;
        switch (spec.lower_form) {
          case LowerForm::WeightedMass: cval = spec.c(x, 0); break;
          case LowerForm::GradGrad: cval = 1.0; break;
          case LowerForm::Mass: cval = 1.0; break;
        }
        const double fval = spec.f(x, 0);
        const int dl = spec.lower_form == LowerForm::GradGrad ? 1 : 0;
        const double jl = dl == 1 ? 2.0 / h : 1.0;

        for (int a = 0; a < nl; ++a) {
          const double pa = scale[a] * tab.v[spec.m](a, q) * jm;
          const double la = scale[a] * tab.v[dl](a, q) * jl;
          const double va = scale[a] * tab.v[0](a, q);
          sys.load[cell[a]] += w * fval * va;
          for (int b = 0; b <= a; ++b) {
            const double pb = scale[b] * tab.v[spec.m](b, q) * jm;
            const double lb = scale[b] * tab.v[dl](b, q) * jl;
            sys.principal.add(cell[a], cell[b], w * pa * pb);
            sys.lower.add(cell[a], cell[b], w * cval * la * lb);
          }
        }
      }
    }
    return sys;
  }

  // 2D, first-order principal part on the tensor Lagrange space.
  const int p = basis.degree();
  const int nl2 = (p + 1) * (p + 1);
  std::vector<int> cell2(nl2);
  std::vector<double> g0(nl2), gx(nl2), gy(nl2);

  for (int cy = 0; cy < mesh.grid.cells_y(); ++cy) {
    const double yl = mesh.grid.y[cy], yr = mesh.grid.y[cy + 1];
    const double hy = yr - yl;
    check_width(hy);
    for (int cx = 0; cx < mesh.grid.cells_x(); ++cx) {
      const double xl = mesh.grid.x[cx], xr = mesh.grid.x[cx + 1];
      const double hx = xr - xl;
      check_width(hx);
      dofs.cell_dofs(cx, cy, cell2);

      for (int qy = 0; qy < nq; ++qy) {
        const double y = 0.5 * ((1.0 - rule.points[qy]) * yl + (1.0 + rule.points[qy]) * yr);
        for (int qx = 0; qx < nq; ++qx) {
          const double x = 0.5 * ((1.0 - rule.points[qx]) * xl + (1.0 + rule.points[qx]) * xr);
          const double w = rule.weights[qx] * rule.weights[qy] * 0.25 * hx * hy;
          const double cval = spec.lower_form == LowerForm::WeightedMass ? spec.c(x, y, 0, 0) : 1.0;
          const double fval = spec.f(x, y, 0, 0);

          for (int b = 0; b <= p; ++b) {
            for (int a = 0; a <= p; ++a) {
              const int i = a + b * (p + 1);
              g0[i] = tab.v[0](a, qx) * tab.v[0](b, qy);
              gx[i] = tab.v[1](a, qx) * (2.0 / hx) * tab.v[0](b, qy);
              gy[i] = tab.v[0](a, qx) * tab.v[1](b, qy) * (2.0 / hy);
            }
          }
          for (int i = 0; i < nl2; ++i) {
            sys.load[cell2[i]] += w * fval * g0[i];
            for (int j = 0; j < nl2; ++j) {
              if (cell2[i] < cell2[j]) continue;
              sys.principal.add(cell2[i], cell2[j], w * (gx[i] * gx[j] + gy[i] * gy[j]));
              sys.lower.add(cell2[i], cell2[j], w * cval * g0[i] * g0[j]);
            }
          }
        }
      }
    }
  }
  return sys;
}

BandedSystem constrained_system(const AssembledSystem& sys, double epsilon, int k) {
  if (!(epsilon > 0.0)) fail(Errc::BadEpsilon, "epsilon must be positive");
  const double scale = std::pow(epsilon, 2 * k);
  if (scale < 1e-300) fail(Errc::QuadratureUnderflow, "eps^{2k} underflows");

  BandMatrix a = sys.lower;
  a.axpy(scale, sys.principal);
  Eigen::VectorXd b = sys.load;
  std::vector<double> zeros(sys.dofs.boundary.size(), 0.0);
  apply_dirichlet(a, b, sys.dofs.boundary, zeros);
  return BandedSystem{std::move(a), std::move(b)};
}

DiscreteFunction galerkin_solve(const ProblemSpec& spec, const STypeMesh& mesh,
                                const ReferenceBasis& basis, int quad_points) {
  AssembledSystem sys = assemble(spec, mesh, basis, quad_points);
  BandedSystem lin = constrained_system(sys, spec.epsilon, spec.k);
  Eigen::VectorXd u = solve(lin);
  return DiscreteFunction(mesh.grid, basis, sys.dofs, std::move(u));
}

}  // namespace spfem
