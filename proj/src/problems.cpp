#include "spfem/problems.hpp"

#include <cmath>
#include <numbers>

#include "spfem/error.hpp"

namespace spfem {
namespace {

constexpr double kPi = std::numbers::pi;

void check_epsilon(double eps) {
  if (!(eps > 0.0) || eps > 0.25) fail(Errc::BadEpsilon, "epsilon must lie in (0, 1/4]");
}

// amp * exp(-x/eps) and its derivatives.
Field left_layer(double eps, double amp) {
  return Field::analytic([eps, amp](double x, int d) {
    return amp * std::pow(-1.0 / eps, d) * std::exp(-x / eps);
  });
}

// amp * exp(-(1-x)/eps) and its derivatives.
Field right_layer(double eps, double amp) {
  return Field::analytic([eps, amp](double x, int d) {
    return amp * std::pow(1.0 / eps, d) * std::exp(-(1.0 - x) / eps);
  });
}

// d-th derivative of sin^2(pi x) = (1 - cos(2 pi x)) / 2.
double sin_sq_deriv(double x, int d) {
  if (d == 0) return std::sin(kPi * x) * std::sin(kPi * x);
  double w = 2.0 * kPi;
  return -0.5 * std::pow(w, d) * std::cos(w * x + d * kPi / 2.0);
}

}  // namespace

Problem problem_1d_reaction(double epsilon, ReactionVariant variant) {
  check_epsilon(epsilon);
  const double eps = epsilon;
  const double q = std::exp(-1.0 / eps);

  Problem prob;
  prob.spec.m = 1;
  prob.spec.k = 1;
  prob.spec.dim = 1;
  prob.spec.epsilon = eps;
  prob.spec.gamma = 1.0;
  prob.spec.lower_form = LowerForm::WeightedMass;

  if (variant == ReactionVariant::ConstantOne) {
    prob.id = "rd1d-const";
    prob.spec.c = Field::analytic([](double, int d) { return d == 0 ? 1.0 : 0.0; });
    prob.spec.f = Field::analytic([](double, int) { return 1.0; }, 0);

    // u = 1 - (exp(-x/eps) + exp(-(1-x)/eps)) / (1 + q)
    const double a = -1.0 / (1.0 + q);
    Field w1 = left_layer(eps, a);
    Field w2 = right_layer(eps, a);
    Field v = Field::analytic([](double, int d) { return d == 0 ? 1.0 : 0.0; });

    prob.decomposition.smooth = v;
    prob.decomposition.layers = {w1, w2};
    prob.decomposition.exact = field_sum({v, w1, w2});
    prob.decomposition.layer_bound = 1.0;
    return prob;
  }

  prob.id = "rd1d-varc";
  // c(x) = 1 + x/2, gamma = 1.
  prob.spec.c = Field::analytic([](double x, int d) {
    if (d == 0) return 1.0 + 0.5 * x;
    return d == 1 ? 0.5 : 0.0;
  });

  // u = v + 2 exp(-x/eps) + exp(-(1-x)/eps) with a smooth part that
  // restores the homogeneous boundary values.
  Field w1 = left_layer(eps, 2.0);
  Field w2 = right_layer(eps, 1.0);
  const double v0 = -(2.0 + q);      // v(0)
  const double v1 = -(1.0 + 2.0 * q);  // v(1)
  Field v = Field::analytic([v0, v1](double x, int d) {
    switch (d) {
      case 0: return std::sin(kPi * x) + v0 * (1.0 - x) + v1 * x;
      case 1: return kPi * std::cos(kPi * x) - v0 + v1;
      default:
        return std::pow(kPi, d) * std::sin(kPi * x + d * kPi / 2.0);
    }
  });

  // f = -eps^2 u'' + c u, assembled from the parts: the layers solve
  // -eps^2 w'' + w = 0, leaving (c - 1) w.
  prob.spec.f = Field::analytic(
      [eps, v, w1, w2](double x, int) {
        double c = 1.0 + 0.5 * x;
        double smooth = -eps * eps * v(x, 2) + c * v(x, 0);
        return smooth + (c - 1.0) * (w1(x, 0) + w2(x, 0));
      },
      0);

  prob.decomposition.smooth = v;
  prob.decomposition.layers = {w1, w2};
  prob.decomposition.exact = field_sum({v, w1, w2});
  prob.decomposition.layer_bound = 2.0;
  return prob;
}

Problem problem_2d_reaction(double epsilon) {
  check_epsilon(epsilon);
  const double eps = epsilon;
  const double q = std::exp(-1.0 / eps);
  const double a = -1.0 / (1.0 + q);

  // g(x) = 1 + omega1(x) + omega2(x) solves -eps^2 g'' + g = 1 with
  // g(0) = g(1) = 0; u = g(x) g(y).
  auto omega1 = [eps, a](double x, int d) {
    return a * std::pow(-1.0 / eps, d) * std::exp(-x / eps);
  };
  auto omega2 = [eps, a](double x, int d) {
    return a * std::pow(1.0 / eps, d) * std::exp(-(1.0 - x) / eps);
  };
  auto g = [omega1, omega2](double x, int d) {
    double base = d == 0 ? 1.0 : 0.0;
    return base + omega1(x, d) + omega2(x, d);
  };

  Problem prob;
  prob.id = "rd2d-tensor";
  prob.spec.m = 1;
  prob.spec.k = 1;
  prob.spec.dim = 2;
  prob.spec.epsilon = eps;
  prob.spec.gamma = 1.0;
  prob.spec.lower_form = LowerForm::WeightedMass;
  prob.spec.c = Field::analytic2([](double, double, int, int) { return 1.0; });
  prob.spec.f = Field::analytic2(
      [g](double x, double y, int, int) {
        return g(x, 0) + g(y, 0) - g(x, 0) * g(y, 0);
      },
      0);

  auto const1 = [](double, double, int dx, int dy) { return dx == 0 && dy == 0 ? 1.0 : 0.0; };
  Field v = Field::analytic2(const1);

  auto edge_x = [](std::function<double(double, int)> w) {
    return Field::analytic2([w](double x, double, int dx, int dy) {
      return dy == 0 ? w(x, dx) : 0.0;
    });
  };
  auto edge_y = [](std::function<double(double, int)> w) {
    return Field::analytic2([w](double, double y, int dx, int dy) {
      return dx == 0 ? w(y, dy) : 0.0;
    });
  };
  auto corner = [](std::function<double(double, int)> wx, std::function<double(double, int)> wy) {
    return Field::analytic2([wx, wy](double x, double y, int dx, int dy) {
      return wx(x, dx) * wy(y, dy);
    });
  };

  prob.decomposition.smooth = v;
  prob.decomposition.layers = {edge_x(omega1), edge_x(omega2), edge_y(omega1), edge_y(omega2)};
  prob.decomposition.corners = {corner(omega1, omega1), corner(omega1, omega2),
                                corner(omega2, omega1), corner(omega2, omega2)};
  prob.decomposition.exact =
      Field::analytic2([g](double x, double y, int dx, int dy) { return g(x, dx) * g(y, dy); });
  prob.decomposition.layer_bound = 1.0;
  return prob;
}

Problem problem_1d_fourth_order(double epsilon, int k) {
  check_epsilon(epsilon);
  if (k != 1 && k != 2) fail(Errc::UnsupportedOrder, "fourth-order catalog has k = 1 or 2");
  const double eps = epsilon;
  const double q = std::exp(-1.0 / eps);

  Problem prob;
  prob.spec.m = 2;
  prob.spec.k = k;
  prob.spec.dim = 1;
  prob.spec.epsilon = eps;
  prob.spec.gamma = 1.0;

  if (k == 1) {
    prob.id = "fourth1d-k1";
    prob.spec.lower_form = LowerForm::GradGrad;
    prob.spec.f = Field::analytic([](double, int) { return 1.0; }, 0);

    // eps^2 u'''' - u'' = 1, clamped: u = A + x/2 - x^2/2
    // + C (exp(-x/eps) + exp(-(1-x)/eps)).
    const double cc = eps / (2.0 * (1.0 - q));
    const double aa = -cc * (1.0 + q);
    Field v = Field::analytic([aa](double x, int d) {
      switch (d) {
        case 0: return aa + 0.5 * x - 0.5 * x * x;
        case 1: return 0.5 - x;
        case 2: return -1.0;
        default: return 0.0;
      }
    });
    Field w1 = left_layer(eps, cc);
    Field w2 = right_layer(eps, cc);

    prob.decomposition.smooth = v;
    prob.decomposition.layers = {w1, w2};
    prob.decomposition.exact = field_sum({v, w1, w2});
    prob.decomposition.layer_bound = (cc / eps) * (1.0 + 1e-9);
    return prob;
  }

  prob.id = "fourth1d-k2";
  prob.spec.lower_form = LowerForm::Mass;

  // For k = m the layers have O(1) amplitude and oscillate on the eps
  // scale.  E(x) = exp(-x/eps) (cos(x/eps) + sin(x/eps)) has E(0) = 1,
  // E'(0) = 0 and |E^(d)| <= sqrt(A_d^2 + B_d^2) eps^{-d} exp(-x/eps),
  // with integer coefficient pairs from (A,B) -> (B - A, -A - B).
  static const double ecoef[9][2] = {{1, 1},  {0, -2},   {-2, 2},  {4, 0},   {-4, -4},
                                     {0, 8},  {8, -8},   {-16, 0}, {16, 16}};
  auto E = [eps](double x, int d) {
    const double t = x / eps;
    return std::pow(eps, -d) * std::exp(-t) *
           (ecoef[d][0] * std::cos(t) + ecoef[d][1] * std::sin(t));
  };
  Field w1 = Field::analytic([E](double x, int d) { return E(x, d); });
  Field w2 = Field::analytic([E](double x, int d) {
    return (d % 2 == 0 ? 1.0 : -1.0) * E(1.0 - x, d);
  });

  // v = sin^2(pi x) + c0 + c1 x (1 - x); c0, c1 cancel the layer tails
  // so that u and u' vanish exactly at both ends.
  const double c0 = -(1.0 + E(1.0, 0));
  const double c1 = E(1.0, 1);
  Field v = Field::analytic([c0, c1](double x, int d) {
    double poly;
    switch (d) {
      case 0: poly = c0 + c1 * x * (1.0 - x); break;
      case 1: poly = c1 * (1.0 - 2.0 * x); break;
      case 2: poly = -2.0 * c1; break;
      default: poly = 0.0;
    }
    return sin_sq_deriv(x, d) + poly;
  });

  // eps^4 E'''' = -4 E, so f = eps^4 u'''' + u picks up -3 (w1 + w2).
  const double e4 = eps * eps * eps * eps;
  prob.spec.f = Field::analytic(
      [v, w1, w2, e4](double x, int) {
        return e4 * sin_sq_deriv(x, 4) + v(x, 0) - 3.0 * (w1(x, 0) + w2(x, 0));
      },
      0);

  prob.decomposition.smooth = v;
  prob.decomposition.layers = {w1, w2};
  prob.decomposition.exact = field_sum({v, w1, w2});
  prob.decomposition.layer_bound = 4.0 * std::sqrt(2.0);
  return prob;
}

Problem problem_by_id(const std::string& id, double epsilon) {
  if (id == "rd1d-const") return problem_1d_reaction(epsilon, ReactionVariant::ConstantOne);
  if (id == "rd1d-varc") return problem_1d_reaction(epsilon, ReactionVariant::VariableC);
  if (id == "rd2d-tensor") return problem_2d_reaction(epsilon);
  if (id == "fourth1d-k1") return problem_1d_fourth_order(epsilon, 1);
  if (id == "fourth1d-k2") return problem_1d_fourth_order(epsilon, 2);
  fail(Errc::BadConfig, "unknown problem id '" + id + "'");
}

std::vector<std::string> catalog_ids() {
  return {"rd1d-const", "rd1d-varc", "rd2d-tensor", "fourth1d-k1", "fourth1d-k2"};
}

}  // namespace spfem
