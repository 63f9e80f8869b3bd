#pragma once

#include <string>
#include <vector>

#include "spfem/field.hpp"
#include "spfem/mesh.hpp"

namespace spfem {

// Cell selection for norm evaluation: the whole domain, the coarse
// interior cells, their complement, or just the ply rim.
enum class Region { All, Coarse, Complement, Ply };

std::string to_string(Region r);

struct NormReport {
  double l2 = 0.0;
  std::vector<double> h_semi;  // seminorms of orders 1..m
  double l_inf = 0.0;          // sampled, a lower bound on the true sup
  double energy = 0.0;         // eps^k |.|_m + ||.||_{m-k}
  double balanced = 0.0;       // eps^{k-1/2} |.|_m + ||.||_{m-k}
  std::string region = "all";

  double h1() const { return h_semi.empty() ? 0.0 : h_semi[0]; }
  double h2() const { return h_semi.size() < 2 ? 0.0 : h_semi[1]; }
  double by_name(const std::string& kind) const;
};

struct NormSetup {
  int m = 1;
  int k = 1;
  double epsilon = 0.0;
  int quad_points = 0;  // 0 picks the assembly default
};

NormReport norm_of_difference(const Field& a, const Field& b, const STypeMesh& mesh,
                              Region region, const NormSetup& setup);

// Least-squares slope of log(error) against log(scale), plus the
// successive pairwise slopes.
enum class RateScaleKind { NInv, NInvLogN, Custom };

struct RateScale {
  RateScaleKind kind = RateScaleKind::NInv;
  std::vector<double> custom;  // per sample, used by Custom

  static RateScale n_inv() { return {RateScaleKind::NInv, {}}; }
  static RateScale n_inv_log_n() { return {RateScaleKind::NInvLogN, {}}; }
  static RateScale general(std::vector<double> factors) {
    return {RateScaleKind::Custom, std::move(factors)};
  }
};

struct RateFit {
  double slope = 0.0;
  std::vector<double> pairwise;
};

RateFit rate_fit(const std::vector<int>& n_values, const std::vector<double>& errors,
                 const RateScale& scale);

}  // namespace spfem
