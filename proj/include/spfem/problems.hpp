#pragma once

#include <string>
#include <vector>

#include "spfem/field.hpp"

namespace spfem {

// Shape of the lower-order part of the bilinear form.
enum class LowerForm {
  WeightedMass,  // (c u, v), order (m, k) = (1, 1) or tensor 2D
  GradGrad,      // (u', v'), order (2, 1)
  Mass,          // (u, v), order (2, 2)
};

// -eps^{2k} (principal part) + lower-order part = f with homogeneous
// boundary conditions through order m - 1.
struct ProblemSpec {
  int m = 1;
  int k = 1;
  int dim = 1;
  double epsilon = 0.0;
  double gamma = 1.0;  // lower bound of the reaction coefficient
  LowerForm lower_form = LowerForm::WeightedMass;
  Field c;  // reaction coefficient (WeightedMass only)
  Field f;  // right-hand side
};

// Exact solution split into a smooth part, boundary layers and (in
// 2D) corner layers.  layer_bound is an explicit constant C with
// |d^i w(x)| <= C eps^{m-k-i} exp(-x/eps) for the layer at x = 0 and
// mirrored on the right, i = 0..2m.
struct SolutionDecomposition {
  Field smooth;
  std::vector<Field> layers;
  std::vector<Field> corners;
  Field exact;
  double layer_bound = 1.0;
};

struct Problem {
  std::string id;
  ProblemSpec spec;
  SolutionDecomposition decomposition;
};

enum class ReactionVariant { ConstantOne, VariableC };

Problem problem_1d_reaction(double epsilon, ReactionVariant variant);
Problem problem_2d_reaction(double epsilon);
Problem problem_1d_fourth_order(double epsilon, int k);

// Catalog ids: rd1d-const, rd1d-varc, rd2d-tensor, fourth1d-k1,
// fourth1d-k2.
Problem problem_by_id(const std::string& id, double epsilon);
std::vector<std::string> catalog_ids();

}  // namespace spfem
