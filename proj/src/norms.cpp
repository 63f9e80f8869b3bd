#include "spfem/norms.hpp"

#include <algorithm>
#include <cmath>

#include "spfem/error.hpp"
#include "spfem/fem.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

std::string to_string(Region r) {
  switch (r) {
    case Region::All: return "all";
    case Region::Coarse: return "coarse";
    case Region::Complement: return "complement";
    case Region::Ply: return "ply";
  }
  return "unknown";
}

double NormReport::by_name(const std::string& kind) const {
  if (kind == "l2") return l2;
  if (kind == "h1") return h1();
  if (kind == "h2") return h2();
  if (kind == "linf") return l_inf;
  if (kind == "energy") return energy;
  if (kind == "balanced") return balanced;
  fail(Errc::BadConfig, "unknown norm kind '" + kind + "'");
}

namespace {

bool in_region(CellClass c, Region r) {
  switch (r) {
    case Region::All: return true;
    case Region::Coarse: return c == CellClass::Coarse;
    case Region::Complement: return c != CellClass::Coarse;
    case Region::Ply: return c == CellClass::Ply;
  }
  return false;
}

// Sample points for the sup norm: quadrature nodes plus a uniform
// sweep including the cell endpoints.
std::vector<double> sup_points(const QuadratureRule& rule) {
  std::vector<double> xi(rule.points.data(), rule.points.data() + rule.points.size());
  const int extra = 9;
  for (int s = 0; s <= extra; ++s) xi.push_back(-1.0 + 2.0 * s / extra);
  return xi;
}

}  // namespace

NormReport norm_of_difference(const Field& a, const Field& b, const STypeMesh& mesh,
                              Region region, const NormSetup& setup) {
  if (a.dim() != mesh.dim || b.dim() != mesh.dim)
    fail(Errc::RegionMeshMismatch, "field dimension does not match the mesh");
  if (setup.m < 1 || setup.m > 2 || setup.k < 1 || setup.k > setup.m)
    fail(Errc::UnsupportedOrder, "norms defined for 1 <= k <= m <= 2");
  if (!(setup.epsilon > 0.0)) fail(Errc::BadEpsilon, "epsilon must be positive");
  if (mesh.dim == 2 && setup.m != 1)
    fail(Errc::UnsupportedOrder, "second-order seminorms are 1D here");

  const int nq = setup.quad_points > 0 ? setup.quad_points : 6;
  QuadratureRule rule = gauss_legendre(nq);
  std::vector<double> sup_xi = sup_points(rule);

  NormReport rep;
  rep.region = to_string(region);
  double l2_sq = 0.0;
  std::vector<double> semi_sq(setup.m, 0.0);
  double sup = 0.0;

  if (mesh.dim == 1) {
    for (int cx = 0; cx < mesh.grid.cells_x(); ++cx) {
      if (!in_region(classify_cell(mesh, cx), region)) continue;
      const double xl = mesh.grid.x[cx], xr = mesh.grid.x[cx + 1];
      const double h = xr - xl;
      for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
        const double x = 0.5 * ((1.0 - rule.points[q]) * xl + (1.0 + rule.points[q]) * xr);
        const double w = rule.weights[q] * 0.5 * h;
        const double d0 = a(x, 0) - b(x, 0);
        l2_sq += w * d0 * d0;
        for (int j = 1; j <= setup.m; ++j) {
          const double dj = a(x, j) - b(x, j);
          semi_sq[j - 1] += w * dj * dj;
        }
      }
      for (double xi : sup_xi) {
        const double x = 0.5 * ((1.0 - xi) * xl + (1.0 + xi) * xr);
        sup = std::max(sup, std::abs(a(x, 0) - b(x, 0)));
      }
    }
  } else {
    for (int cy = 0; cy < mesh.grid.cells_y(); ++cy) {
      const double yl = mesh.grid.y[cy], yr = mesh.grid.y[cy + 1];
      const double hy = yr - yl;
      for (int cx = 0; cx < mesh.grid.cells_x(); ++cx) {
        if (!in_region(classify_cell(mesh, cx, cy), region)) continue;
        const double xl = mesh.grid.x[cx], xr = mesh.grid.x[cx + 1];
        const double hx = xr - xl;
        for (Eigen::Index qy = 0; qy < rule.points.size(); ++qy) {
          const double y = 0.5 * ((1.0 - rule.points[qy]) * yl + (1.0 + rule.points[qy]) * yr);
          for (Eigen::Index qx = 0; qx < rule.points.size(); ++qx) {
            const double x = 0.5 * ((1.0 - rule.points[qx]) * xl + (1.0 + rule.points[qx]) * xr);
            const double w = rule.weights[qx] * rule.weights[qy] * 0.25 * hx * hy;
            const double d0 = a(x, y, 0, 0) - b(x, y, 0, 0);
            const double dx = a(x, y, 1, 0) - b(x, y, 1, 0);
            const double dy = a(x, y, 0, 1) - b(x, y, 0, 1);
            l2_sq += w * d0 * d0;
            semi_sq[0] += w * (dx * dx + dy * dy);
          }
        }
        for (double eta : sup_xi) {
          const double y = 0.5 * ((1.0 - eta) * yl + (1.0 + eta) * yr);
          for (double xi : sup_xi) {
            const double x = 0.5 * ((1.0 - xi) * xl + (1.0 + xi) * xr);
            sup = std::max(sup, std::abs(a(x, y, 0, 0) - b(x, y, 0, 0)));
          }
        }
      }
    }
  }

  rep.l2 = std::sqrt(l2_sq);
  rep.h_semi.resize(setup.m);
  for (int j = 0; j < setup.m; ++j) rep.h_semi[j] = std::sqrt(semi_sq[j]);
  rep.l_inf = sup;

  // Lower part ||.||_{m-k} of the energy and balanced norms.
  double lower_sq = l2_sq;
  for (int j = 1; j <= setup.m - setup.k; ++j) lower_sq += semi_sq[j - 1];
  const double lower = std::sqrt(lower_sq);
  const double top = rep.h_semi[setup.m - 1];
  rep.energy = std::pow(setup.epsilon, setup.k) * top + lower;
  rep.balanced = std::pow(setup.epsilon, setup.k - 0.5) * top + lower;
  return rep;
}

RateFit rate_fit(const std::vector<int>& n_values, const std::vector<double>& errors,
                 const RateScale& scale) {
  if (n_values.size() != errors.size()) fail(Errc::BadConfig, "rate fit size mismatch");
  if (n_values.size() < 2) fail(Errc::TooFewPoints, "rate fit needs at least two samples");
  if (scale.kind == RateScaleKind::Custom && scale.custom.size() != n_values.size())
    fail(Errc::BadConfig, "custom scale needs one factor per sample");

  std::vector<double> s(n_values.size());
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (errors[i] <= 0.0 || !std::isfinite(errors[i]))
      fail(Errc::NonPositiveError, "errors must be positive for a log fit");
    const double n = n_values[i];
    switch (scale.kind) {
      case RateScaleKind::NInv: s[i] = 1.0 / n; break;
      case RateScaleKind::NInvLogN: s[i] = std::log(n) / n; break;
      case RateScaleKind::Custom: s[i] = scale.custom[i]; break;
    }
    if (!(s[i] > 0.0)) fail(Errc::NonPositiveError, "scale factors must be positive");
  }

  const size_t n = n_values.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += std::log(s[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (std::log(s[i]) - mx) * (std::log(errors[i]) - my);
    den += (std::log(s[i]) - mx) * (std::log(s[i]) - mx);
  }

  RateFit fit;
  fit.slope = num / den;
  for (size_t i = 0; i + 1 < n; ++i)
    fit.pairwise.push_back(std::log(errors[i + 1] / errors[i]) / std::log(s[i + 1] / s[i]));
  return fit;
}

}  // namespace spfem
