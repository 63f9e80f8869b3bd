#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "spfem/error.hpp"
#include "spfem/fem.hpp"
#include "spfem/quadrature.hpp"

using namespace spfem;

namespace {

// Shishkin meshes degenerate to a uniform mesh when lambda reaches
// 1/4; handy for checking assembly against textbook element matrices.
STypeMesh uniform_mesh(int n, int dim = 1) {
  const double eps = 0.25 / (2.0 * std::log(n));
  return build_mesh(MeshGeneratingFunction::shishkin(n), make_transition(eps, 2.0, n), dim);
}

STypeMesh layer_mesh(int n, double eps, double sigma = 2.0, int dim = 1) {
  return build_mesh(MeshGeneratingFunction::shishkin(n), make_transition(eps, sigma, n), dim);
}

ProblemSpec reaction_spec(double eps, Field f) {
  ProblemSpec spec;
  spec.m = 1;
  spec.k = 1;
  spec.dim = 1;
  spec.epsilon = eps;
  spec.c = Field::analytic([](double, int d) { return d == 0 ? 1.0 : 0.0; });
  spec.f = std::move(f);
  return spec;
}

}  // namespace

TEST_CASE("dofmap numbering for nodal elements") {
  STypeMesh mesh = uniform_mesh(8);
  DofMap p1 = make_dofmap(mesh.grid, ReferenceBasis::lagrange_gl(1), 1);
  CHECK(p1.n_dofs == 9);
  CHECK(p1.bandwidth == 1);
  CHECK(p1.boundary == std::vector<int>{0, 8});
  CHECK(p1.coords_x[0] == 0.0);
  CHECK(p1.coords_x[8] == 1.0);

  DofMap p2 = make_dofmap(mesh.grid, ReferenceBasis::lagrange_gl(2), 1);
  CHECK(p2.n_dofs == 17);
  CHECK(p2.bandwidth == 2);
  // Every second interpolation node is a mesh node.
  for (int i = 0; i <= 8; ++i)
    CHECK(p2.coords_x[2 * i] == doctest::Approx(mesh.grid.x[i]).epsilon(1e-15));

  std::vector<int> dofs;
  p2.cell_dofs(3, dofs);
  CHECK(dofs == std::vector<int>{6, 7, 8});
}

TEST_CASE("dofmap numbering for hermite elements") {
  STypeMesh mesh = uniform_mesh(8);
  DofMap hm = make_dofmap(mesh.grid, ReferenceBasis::hermite_cubic(), 2);
  CHECK(hm.n_dofs == 18);
  CHECK(hm.bandwidth == 3);
  CHECK(hm.boundary == std::vector<int>{0, 1, 16, 17});

  DofMap hm1 = make_dofmap(mesh.grid, ReferenceBasis::hermite_cubic(), 1);
  CHECK(hm1.boundary == std::vector<int>{0, 16});

  std::vector<int> dofs;
  hm.cell_dofs(2, dofs);
  CHECK(dofs == std::vector<int>{4, 5, 6, 7});
}

TEST_CASE("dofmap numbering in two dimensions") {
  STypeMesh mesh = uniform_mesh(4, 2);
  DofMap dm = make_dofmap(mesh.grid, ReferenceBasis::lagrange_gl(1), 1);
  CHECK(dm.n_dofs == 25);
  CHECK(dm.bandwidth == 6);  // x-fastest numbering couples (i, j) to (i+1, j+1)
  std::vector<int> dofs;
  dm.cell_dofs(0, 0, dofs);
  CHECK(dofs == std::vector<int>{0, 1, 5, 6});
  dm.cell_dofs(3, 3, dofs);
  CHECK(dofs == std::vector<int>{18, 19, 23, 24});
  // All four edges are pinned.
  CHECK(dm.boundary.size() == 16);
}

TEST_CASE("p1 element matrices on a uniform mesh") {
  const int n = 8;
  STypeMesh mesh = uniform_mesh(n);
  const double h = 1.0 / n;
  ProblemSpec spec = reaction_spec(mesh.params.epsilon,
                                   Field::analytic([](double, int) { return 1.0; }, 0));
  AssembledSystem sys = assemble(spec, mesh, ReferenceBasis::lagrange_gl(1));

  for (int i = 1; i < n; ++i) {
    CHECK(sys.principal.get(i, i) == doctest::Approx(2.0 / h).epsilon(1e-12));
    CHECK(sys.principal.get(i, i - 1) == doctest::Approx(-1.0 / h).epsilon(1e-12));
    CHECK(sys.lower.get(i, i) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-12));
    CHECK(sys.lower.get(i, i - 1) == doctest::Approx(h / 6.0).epsilon(1e-12));
    CHECK(sys.load[i] == doctest::Approx(h).epsilon(1e-12));
  }
  CHECK(sys.principal.get(0, 0) == doctest::Approx(1.0 / h).epsilon(1e-12));
  CHECK(sys.load[0] == doctest::Approx(h / 2.0).epsilon(1e-12));
}

TEST_CASE("zero load gives the zero solution") {
  STypeMesh mesh = layer_mesh(16, 1e-3);
  ProblemSpec spec = reaction_spec(1e-3, Field::zero(1));
  DiscreteFunction u = galerkin_solve(spec, mesh, ReferenceBasis::lagrange_gl(2));
  CHECK(u.coeffs().lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("quadratic solutions are reproduced exactly") {
  // u = x (1 - x) lies in the p = 2 space, so the discrete solution
  // is exact up to solver roundoff.
  const double eps = 1e-2;
  STypeMesh mesh = layer_mesh(16, eps);
  ProblemSpec spec = reaction_spec(
      eps, Field::analytic([eps](double x, int) { return 2.0 * eps * eps + x * (1.0 - x); }, 0));
  DiscreteFunction u = galerkin_solve(spec, mesh, ReferenceBasis::lagrange_gl(2));
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
    CHECK(std::abs(u.eval(x) - x * (1.0 - x)) <= 1e-9);
    CHECK(std::abs(u.eval(x, 1) - (1.0 - 2.0 * x)) <= 1e-8);
  }
}

TEST_CASE("discrete solutions have the continuity of their basis") {
  const double eps = 1e-3;
  STypeMesh mesh = layer_mesh(16, eps);
  Problem prob = problem_by_id("rd1d-const", eps);
  DiscreteFunction u = galerkin_solve(prob.spec, mesh, ReferenceBasis::lagrange_gl(2));
  for (int i = 1; i < 16; ++i) {
    const double x = mesh.grid.x[i];
    CHECK(u.eval_on_cell(i - 1, 0, x) == doctest::Approx(u.eval_on_cell(i, 0, x)).epsilon(1e-12));
  }

  Problem prob4 = problem_by_id("fourth1d-k1", eps);
  STypeMesh mesh4 = layer_mesh(16, eps, 4.0);
  DiscreteFunction w = galerkin_solve(prob4.spec, mesh4, ReferenceBasis::hermite_cubic());
  for (int i = 1; i < 16; ++i) {
    const double x = mesh4.grid.x[i];
    for (int d = 0; d <= 1; ++d) {
      const double jump = w.eval_on_cell(i, d, x) - w.eval_on_cell(i - 1, d, x);
      const double scale = std::max(1.0, std::abs(w.eval_on_cell(i, d, x)));
      CHECK(std::abs(jump) <= 1e-11 * scale);
    }
  }
}

TEST_CASE("constrained system reproduces the galerkin solution") {
  const double eps = 1e-4;
  STypeMesh mesh = layer_mesh(32, eps);
  Problem prob = problem_by_id("rd1d-varc", eps);
  ReferenceBasis basis = ReferenceBasis::lagrange_gl(2);

  AssembledSystem sys = assemble(prob.spec, mesh, basis);
  Eigen::VectorXd x = solve(constrained_system(sys, eps, prob.spec.k));
  DiscreteFunction u = galerkin_solve(prob.spec, mesh, basis);
  CHECK((x - u.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-12);

  // The same assembly serves other epsilon scalings.
  Eigen::VectorXd y = solve(constrained_system(sys, 2.0 * eps, prob.spec.k));
  CHECK((y - u.coeffs()).lpNorm<Eigen::Infinity>() > 1e-8);
}

TEST_CASE("discrete residual vanishes on interior test functions") {
  const double eps = 1e-3;
  STypeMesh mesh = layer_mesh(32, eps);
  Problem prob = problem_by_id("rd1d-const", eps);
  AssembledSystem sys = assemble(prob.spec, mesh, ReferenceBasis::lagrange_gl(2));
  DiscreteFunction u = galerkin_solve(prob.spec, mesh, ReferenceBasis::lagrange_gl(2));

  Eigen::VectorXd residual = sys.load - eps * eps * sys.principal.multiply(u.coeffs()) -
                             sys.lower.multiply(u.coeffs());
  for (int i = 0; i < sys.dofs.n_dofs; ++i) {
    bool pinned = false;
    for (int b : sys.dofs.boundary) pinned = pinned || b == i;
    if (!pinned) CHECK(std::abs(residual[i]) <= 1e-12 * sys.load.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("galerkin orthogonality against the exact solution") {
  // B(u - u_N, chi) = 0 for discrete chi with homogeneous boundary
  // values; integrate with an independent 16-point rule per cell.
  const double eps = 1e-2;
  STypeMesh mesh = layer_mesh(32, eps);
  Problem prob = problem_by_id("rd1d-const", eps);
  ReferenceBasis basis = ReferenceBasis::lagrange_gl(2);
  DiscreteFunction u_n = galerkin_solve(prob.spec, mesh, basis);
  const Field& u = prob.decomposition.exact;
  QuadratureRule rule = gauss_legendre(16);

  std::mt19937 rng(321);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DofMap dm = u_n.dofs();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd c(dm.n_dofs);
    for (int i = 0; i < dm.n_dofs; ++i) c[i] = gauss(rng);
    for (int b : dm.boundary) c[b] = 0.0;
    DiscreteFunction chi(mesh.grid, basis, dm, c);

    double b_err = 0.0, b_chi = 0.0, b_e = 0.0;
    for (int cx = 0; cx < mesh.grid.cells_x(); ++cx) {
      const double a = mesh.grid.x[cx], bb = mesh.grid.x[cx + 1];
      const double jac = 0.5 * (bb - a);
      for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
        const double x = a + jac * (rule.points[q] + 1.0);
        const double w = jac * rule.weights[q];
        const double de = u(x, 1) - u_n.eval_on_cell(cx, 1, x);
        const double e = u(x, 0) - u_n.eval_on_cell(cx, 0, x);
        const double cg = chi.eval_on_cell(cx, 1, x);
        const double cv = chi.eval_on_cell(cx, 0, x);
        b_err += w * (eps * eps * de * cg + e * cv);
        b_chi += w * (eps * eps * cg * cg + cv * cv);
        b_e += w * (eps * eps * de * de + e * e);
      }
    }
    CAPTURE(trial);
    CHECK(std::abs(b_err) <= 1e-8 * std::sqrt(b_chi * b_e));
  }
}

TEST_CASE("two dimensional solve approximates the tensor solution") {
  const double eps = 0.04;
  STypeMesh mesh = layer_mesh(16, eps, 2.0, 2);
  Problem prob = problem_by_id("rd2d-tensor", eps);
  DiscreteFunction u = galerkin_solve(prob.spec, mesh, ReferenceBasis::lagrange_gl(1));
  double worst = 0.0;
  for (double x : {0.1, 0.5, 0.9}) {
    for (double y : {0.2, 0.5, 0.8}) {
      worst = std::max(worst,
                       std::abs(u.eval(x, y, 0, 0) - prob.decomposition.exact(x, y, 0, 0)));
    }
  }
  CHECK(worst < 0.05);
  CHECK(u.eval(0.0, 0.5, 0, 0) == 0.0);
}

TEST_CASE("assembly validates its inputs") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::BadConfig;
  };

  STypeMesh mesh = layer_mesh(8, 1e-3);
  Problem p4 = problem_by_id("fourth1d-k1", 1e-3);
  // C0 elements cannot discretize a fourth-order form.
  CHECK(code_of([&] { assemble(p4.spec, mesh, ReferenceBasis::lagrange_gl(2)); }) ==
        Errc::IncompatibleBasis);
  CHECK(code_of([&] { make_dofmap(mesh.grid, ReferenceBasis::lagrange_gl(2), 2); }) ==
        Errc::IncompatibleBasis);

  STypeMesh mesh2 = layer_mesh(8, 1e-3, 2.0, 2);
  CHECK(code_of([&] { make_dofmap(mesh2.grid, ReferenceBasis::hermite_cubic(), 2); }) ==
        Errc::UnsupportedOrder);
  Problem p1 = problem_by_id("rd1d-const", 1e-3);
  CHECK(code_of([&] { assemble(p1.spec, mesh2, ReferenceBasis::lagrange_gl(1)); }) ==
        Errc::RegionMeshMismatch);

  ProblemSpec no_rhs = reaction_spec(1e-3, Field());
  CHECK(code_of([&] { assemble(no_rhs, mesh, ReferenceBasis::lagrange_gl(1)); }) ==
        Errc::BadConfig);

  AssembledSystem sys = assemble(p1.spec, mesh, ReferenceBasis::lagrange_gl(1));
  CHECK(code_of([&] { constrained_system(sys, 1e-200, 2); }) == Errc::QuadratureUnderflow);
  CHECK(code_of([&] { constrained_system(sys, -1.0, 1); }) == Errc::BadEpsilon);
}

TEST_CASE("discrete functions round trip through fields") {
  STypeMesh mesh = layer_mesh(16, 1e-3);
  Problem prob = problem_by_id("rd1d-const", 1e-3);
  DiscreteFunction u = galerkin_solve(prob.spec, mesh, ReferenceBasis::lagrange_gl(2));
  Field f = u.as_field();
  for (double x : {0.0, 0.3, 0.55, 1.0}) {
    CHECK(f(x, 0) == u.eval(x, 0));
    CHECK(f(x, 1) == u.eval(x, 1));
  }
}

TEST_CASE("quadrature defaults grow with the degree") {
  CHECK(default_quad_points(1) == 6);
  CHECK(default_quad_points(4) == 6);
  CHECK(default_quad_points(7) == 9);
}
