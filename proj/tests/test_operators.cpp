#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "spfem/error.hpp"
#include "spfem/operators.hpp"
#include "spfem/quadrature.hpp"

using namespace spfem;

namespace {

constexpr double kPi = 3.14159265358979323846;

STypeMesh shishkin_mesh(int n, double eps, double sigma = 2.0, int dim = 1) {
  return build_mesh(MeshGeneratingFunction::shishkin(n), make_transition(eps, sigma, n), dim);
}

Field smooth_wave() {
  return Field::analytic([](double x, int d) {
    return std::pow(2.0 * kPi, d) * std::sin(2.0 * kPi * x + d * kPi / 2.0) +
           (d == 0 ? x : (d == 1 ? 1.0 : 0.0));
  });
}

Field cubic_field() {
  return Field::analytic([](double x, int d) {
    switch (d) {
      case 0: return x * x * x - x + 0.5;
      case 1: return 3.0 * x * x - 1.0;
      case 2: return 6.0 * x;
      case 3: return 6.0;
      default: return 0.0;
    }
  });
}

Field unit_weight() {
  return Field::analytic([](double, int d) { return d == 0 ? 1.0 : 0.0; });
}

// Integral of c (a - b) w over the coarse cells with a 16-point rule.
double coarse_defect_pairing(const Field& v, const DiscreteFunction& pv,
                             const DiscreteFunction& w, const Field& c,
                             const STypeMesh& mesh) {
  QuadratureRule rule = gauss_legendre(16);
  const Grid& grid = pv.grid();
  double acc = 0.0;
  for (int cx = 0; cx < grid.cells_x(); ++cx) {
    const double xl = grid.x[cx], xr = grid.x[cx + 1];
    const double jac = 0.5 * (xr - xl);
    for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
      const double x = xl + jac * (rule.points[q] + 1.0);
      acc += jac * rule.weights[q] * c(x, 0) *
             (v(x, 0) - pv.eval_on_cell(cx, 0, x)) * w.eval_on_cell(cx, 0, x);
    }
  }
  (void)mesh;
  return acc;
}

}  // namespace

TEST_CASE("nodal interpolation reproduces polynomials of the space") {
  STypeMesh mesh = shishkin_mesh(16, 1e-3);
  Field quad = Field::analytic([](double x, int d) {
    switch (d) {
      case 0: return 1.0 + 2.0 * x + 3.0 * x * x;
      case 1: return 2.0 + 6.0 * x;
      case 2: return 6.0;
      default: return 0.0;
    }
  });
  DiscreteFunction ip = interpolate_gl(quad, mesh, ReferenceBasis::lagrange_gl(2));
  for (double x : {0.0, 1e-4, 0.3, 0.5, 0.77, 1.0})
    CHECK(ip.eval(x) == doctest::Approx(quad(x, 0)).epsilon(1e-13));

  // p = 1 cannot reproduce the quadratic but matches it at the nodes.
  DiscreteFunction ip1 = interpolate_gl(quad, mesh, ReferenceBasis::lagrange_gl(1));
  for (int i = 0; i <= 16; ++i)
    CHECK(ip1.eval_on_cell(std::min(i, 15), 0, mesh.grid.x[i]) ==
          doctest::Approx(quad(mesh.grid.x[i], 0)).epsilon(1e-13));
}

TEST_CASE("hermite interpolation reproduces cubics with their slopes") {
  STypeMesh mesh = shishkin_mesh(16, 1e-3, 4.0);
  DiscreteFunction ih = interpolate_hermite(cubic_field(), mesh);
  Field u = cubic_field();
  for (double x : {0.0, 0.13, 0.5, 0.81, 1.0}) {
    CHECK(ih.eval(x, 0) == doctest::Approx(u(x, 0)).epsilon(1e-13));
    CHECK(ih.eval(x, 1) == doctest::Approx(u(x, 1)).epsilon(1e-12));
  }

  // A general field is matched in value and slope at every node.
  Field w = smooth_wave();
  DiscreteFunction iw = interpolate_hermite(w, mesh);
  for (int i = 0; i <= 16; ++i) {
    const int cx = std::min(i, 15);
    CHECK(iw.eval_on_cell(cx, 0, mesh.grid.x[i]) ==
          doctest::Approx(w(mesh.grid.x[i], 0)).epsilon(1e-13));
    CHECK(iw.eval_on_cell(cx, 1, mesh.grid.x[i]) ==
          doctest::Approx(w(mesh.grid.x[i], 1)).epsilon(1e-11));
  }
}

TEST_CASE("coarse subgrid spans the transition interval") {
  STypeMesh mesh = shishkin_mesh(16, 1e-3);
  Grid cg = coarse_subgrid(mesh);
  CHECK(cg.cells_x() == 8);
  CHECK(cg.x[0] == doctest::Approx(mesh.lambda()).epsilon(1e-15));
  CHECK(cg.x[8] == doctest::Approx(1.0 - mesh.lambda()).epsilon(1e-15));

  STypeMesh mesh2 = shishkin_mesh(16, 1e-3, 2.0, 2);
  Grid cg2 = coarse_subgrid(mesh2);
  CHECK(cg2.dim == 2);
  CHECK(cg2.cell_count() == 64);
}

TEST_CASE("weighted projection is idempotent and orthogonal") {
  const double eps = 1e-4;
  STypeMesh mesh = shishkin_mesh(32, eps);
  ReferenceBasis basis = ReferenceBasis::lagrange_gl(2);
  Field v = smooth_wave();
  Field c = Field::analytic([](double x, int d) {
    if (d == 0) return 1.0 + 0.5 * x;
    return d == 1 ? 0.5 : 0.0;
  });

  DiscreteFunction pv = weighted_l2_projection(v, mesh, c, basis);
  DiscreteFunction ppv = weighted_l2_projection(pv.as_field(), mesh, c, basis);
  CHECK((pv.coeffs() - ppv.coeffs()).lpNorm<Eigen::Infinity>() <=
        1e-11 * std::max(1.0, pv.coeffs().lpNorm<Eigen::Infinity>()));

  // Defect orthogonal to random members of the coarse space.
  DofMap dm = make_dofmap(pv.grid(), basis, 0);
  std::mt19937 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd cw(dm.n_dofs);
    for (int i = 0; i < dm.n_dofs; ++i) cw[i] = gauss(rng);
    DiscreteFunction w(pv.grid(), basis, dm, cw);
    const double pairing = coarse_defect_pairing(v, pv, w, c, mesh);
    CHECK(std::abs(pairing) <= 1e-10);
  }

  // Polynomials inside the space are fixed points.
  Field quad = Field::analytic([](double x, int d) {
    switch (d) {
      case 0: return x * x;
      case 1: return 2.0 * x;
      case 2: return 2.0;
      default: return 0.0;
    }
  });
  DiscreteFunction pq = weighted_l2_projection(quad, mesh, unit_weight(), basis);
  for (double x : {mesh.lambda(), 0.4, 0.62, 1.0 - mesh.lambda()})
    CHECK(pq.eval(x) == doctest::Approx(x * x).epsilon(1e-11));
}

TEST_CASE("fourth order projection pins the transition defect") {
  const double eps = 1e-4;
  STypeMesh mesh = shishkin_mesh(32, eps, 4.0);
  Field v = smooth_wave();

  // k = 1: the defect v - Pv vanishes at both transition points.
  DiscreteFunction pv = ritz_projection(v, mesh, LowerForm::GradGrad, 2, 1);
  const double lam = mesh.lambda();
  CHECK(std::abs(v(lam, 0) - pv.eval(lam, 0)) <= 1e-10);
  CHECK(std::abs(v(1.0 - lam, 0) - pv.eval(1.0 - lam, 0)) <= 1e-10);

  // Idempotence for both k variants.
  DiscreteFunction ppv = ritz_projection(pv.as_field(), mesh, LowerForm::GradGrad, 2, 1);
  CHECK((pv.coeffs() - ppv.coeffs()).lpNorm<Eigen::Infinity>() <=
        1e-11 * std::max(1.0, pv.coeffs().lpNorm<Eigen::Infinity>()));

  DiscreteFunction qv = ritz_projection(v, mesh, LowerForm::Mass, 2, 2);
  DiscreteFunction qqv = ritz_projection(qv.as_field(), mesh, LowerForm::Mass, 2, 2);
  CHECK((qv.coeffs() - qqv.coeffs()).lpNorm<Eigen::Infinity>() <=
        1e-11 * std::max(1.0, qv.coeffs().lpNorm<Eigen::Infinity>()));

  // Cubics are reproduced.
  DiscreteFunction pc = ritz_projection(cubic_field(), mesh, LowerForm::GradGrad, 2, 1);
  Field u = cubic_field();
  for (double x : {lam, 0.35, 0.5, 1.0 - lam})
    CHECK(pc.eval(x, 0) == doctest::Approx(u(x, 0)).epsilon(1e-10));
}

TEST_CASE("transition indicator marks the coarse boundary nodes") {
  STypeMesh mesh = shishkin_mesh(16, 1e-3);

  NodalIndicator left1 = chi_tau(mesh, ReferenceBasis::lagrange_gl(1), 3);
  REQUIRE(left1.coeffs.size() == 2);
  CHECK(left1.coeffs[0] == 0.0);
  CHECK(left1.coeffs[1] == 1.0);

  NodalIndicator right1 = chi_tau(mesh, ReferenceBasis::lagrange_gl(1), 12);
  CHECK(right1.coeffs[0] == 1.0);
  CHECK(right1.coeffs[1] == 0.0);

  NodalIndicator left2 = chi_tau(mesh, ReferenceBasis::lagrange_gl(2), 3);
  REQUIRE(left2.coeffs.size() == 3);
  CHECK(left2.coeffs[0] == 0.0);
  CHECK(left2.coeffs[1] == 0.0);
  CHECK(left2.coeffs[2] == 1.0);

  STypeMesh mesh2 = shishkin_mesh(16, 1e-3, 2.0, 2);
  // Edge ply cell: the whole transition edge is flagged.
  NodalIndicator edge = chi_tau(mesh2, ReferenceBasis::lagrange_gl(1), 3, 8);
  REQUIRE(edge.coeffs.size() == 4);
  CHECK(edge.coeffs[0] == 0.0);
  CHECK(edge.coeffs[1] == 1.0);
  CHECK(edge.coeffs[2] == 0.0);
  CHECK(edge.coeffs[3] == 1.0);
  // Corner ply cell: only the corner node touches the coarse closure.
  NodalIndicator corner = chi_tau(mesh2, ReferenceBasis::lagrange_gl(1), 3, 3);
  CHECK(corner.coeffs[0] == 0.0);
  CHECK(corner.coeffs[1] == 0.0);
  CHECK(corner.coeffs[2] == 0.0);
  CHECK(corner.coeffs[3] == 1.0);
}

TEST_CASE("hybrid interpolant is conforming and region aware") {
  const double eps = 1e-4;
  Problem prob = problem_by_id("rd1d-varc", eps);
  STypeMesh mesh = shishkin_mesh(16, eps);
  ReferenceBasis basis = ReferenceBasis::lagrange_gl(2);
  OperatorOutput out = hybrid_interpolant(prob, mesh, basis);

  REQUIRE(out.region_tags.size() == 16);
  for (int cx = 0; cx < 16; ++cx) CHECK(out.region_tags[cx] == classify_cell(mesh, cx));

  for (int i = 1; i < 16; ++i) {
    const double x = mesh.grid.x[i];
    const double jump = out.result.eval_on_cell(i, 0, x) - out.result.eval_on_cell(i - 1, 0, x);
    CHECK(std::abs(jump) <= 1e-10);
  }

  // Layer cells carry plain nodal interpolation of the full solution.
  DiscreteFunction ip = interpolate_gl(prob.decomposition.exact, mesh, basis);
  for (int cx : {0, 1, 2, 13, 14, 15}) {
    const double x = 0.5 * (mesh.grid.x[cx] + mesh.grid.x[cx + 1]);
    CHECK(std::abs(out.result.eval_on_cell(cx, 0, x) - ip.eval_on_cell(cx, 0, x)) <= 1e-12);
  }
}

TEST_CASE("hybrid interpolant drops layers on the coarse interior") {
  const double eps = 1e-4;
  STypeMesh mesh = shishkin_mesh(16, eps);
  ReferenceBasis basis = ReferenceBasis::lagrange_gl(1);
  Field layer = Field::analytic(
      [eps](double x, int d) { return std::pow(-1.0 / eps, d) * std::exp(-x / eps); });
  OperatorOutput out = hybrid_parts(Field::zero(1), layer, mesh, basis, 1, 1,
                                    LowerForm::WeightedMass, unit_weight());
  for (int cx = 4; cx < 12; ++cx) {
    const double x = 0.5 * (mesh.grid.x[cx] + mesh.grid.x[cx + 1]);
    CHECK(out.result.eval_on_cell(cx, 0, x) == 0.0);
  }
}

TEST_CASE("hermite hybrid interpolant is c1 conforming") {
  const double eps = 1e-4;
  Problem prob = problem_by_id("fourth1d-k1", eps);
  STypeMesh mesh = shishkin_mesh(16, eps, 4.0);
  OperatorOutput out = hybrid_interpolant(prob, mesh, ReferenceBasis::hermite_cubic());
  for (int i = 1; i < 16; ++i) {
    const double x = mesh.grid.x[i];
    for (int d = 0; d <= 1; ++d) {
      const double jump =
          out.result.eval_on_cell(i, d, x) - out.result.eval_on_cell(i - 1, d, x);
      CHECK(std::abs(jump) <= 1e-10);
    }
  }
}

TEST_CASE("operator inputs are validated") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::BadConfig;
  };

  STypeMesh mesh = shishkin_mesh(16, 1e-3);
  STypeMesh mesh2 = shishkin_mesh(16, 1e-3, 2.0, 2);
  Field v = smooth_wave();

  CHECK(code_of([&] { interpolate_gl(v, mesh, ReferenceBasis::hermite_cubic()); }) ==
        Errc::IncompatibleBasis);
  CHECK(code_of([&] { interpolate_gl(v, mesh2, ReferenceBasis::lagrange_gl(1)); }) ==
        Errc::RegionMeshMismatch);
  CHECK(code_of([&] { interpolate_hermite(Field::analytic([](double, int) { return 0.0; }, 0),
                                          mesh); }) == Errc::MissingDerivative);
  CHECK(code_of([&] { ritz_projection(v, mesh, LowerForm::GradGrad, 1, 1); }) ==
        Errc::UnsupportedOrder);
  CHECK(code_of([&] { chi_tau(mesh, ReferenceBasis::lagrange_gl(1), 5); }) == Errc::NotPlyCell);
  CHECK(code_of([&] { chi_tau(mesh2, ReferenceBasis::lagrange_gl(1), 3); }) ==
        Errc::RegionMeshMismatch);
  CHECK(code_of([&] { chi_tau(mesh2, ReferenceBasis::lagrange_gl(1), 4, 4); }) ==
        Errc::NotPlyCell);
  CHECK(code_of([&] { chi_tau(mesh, ReferenceBasis::hermite_cubic(), 3); }) ==
        Errc::IncompatibleBasis);
  CHECK(code_of([&] {
          hybrid_parts(Field(), Field(), mesh, ReferenceBasis::lagrange_gl(1), 1, 1,
                       LowerForm::WeightedMass, unit_weight());
        }) == Errc::MissingDecomposition);
  CHECK(code_of([&] {
          hybrid_parts(v, Field::zero(1), mesh, ReferenceBasis::hermite_cubic(), 1, 1,
                       LowerForm::WeightedMass, unit_weight());
        }) == Errc::IncompatibleBasis);
  CHECK(code_of([&] {
          hybrid_parts(v, Field::zero(1), mesh, ReferenceBasis::lagrange_gl(2), 2, 1,
                       LowerForm::GradGrad, unit_weight());
        }) == Errc::IncompatibleBasis);

  Problem bare;
  bare.spec = problem_by_id("rd1d-const", 1e-3).spec;
  CHECK(code_of([&] { hybrid_interpolant(bare, mesh, ReferenceBasis::lagrange_gl(1)); }) ==
        Errc::MissingDecomposition);
}
