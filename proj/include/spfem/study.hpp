#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "spfem/fem.hpp"
#include "spfem/mesh.hpp"
#include "spfem/norms.hpp"
#include "spfem/operators.hpp"
#include "spfem/problems.hpp"

namespace spfem {

struct StudyConfig {
  std::string problem = "rd1d-const";
  MeshKind mesh_kind = MeshKind::Shishkin;
  double sigma = 0.0;  // 0: defaults to degree + 1
  int degree = 0;      // 0: problem default (1 first order, 3 fourth order)
  std::vector<int> n_values;
  std::vector<double> epsilons;
  std::vector<std::string> norms;  // empty: every defined kind
  std::string output_csv;
  std::string output_json;
  int quadrature_order = 0;  // 0: assembly default
  bool allow_small_sigma = false;
};

StudyConfig config_from_json(const nlohmann::json& j);
StudyConfig load_config(const std::string& path);

// Resolves defaults and validates; throws BadConfig on bad input.
void finalize_config(StudyConfig& cfg);

struct StudyRow {
  double epsilon = 0.0;
  int n = 0;
  double lambda = 0.0;
  double h = 0.0;
  double max_psi_prime = 0.0;
  NormReport total;          // u - u^N
  NormReport interpolation;  // u - Pu
  NormReport discrete;       // Pu - u^N
};

struct RateResult {
  double epsilon = 0.0;
  std::string norm_kind;
  std::string component = "total";
  std::string scale;  // n_inv, n_inv_log_n, general
  double fit = 0.0;
  std::vector<double> pairwise;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string details;
};

struct ConvergenceReport {
  StudyConfig config;
  int m = 0, k = 0;
  int degree = 0;
  double sigma = 0.0;
  std::vector<StudyRow> rows;
  std::vector<RateResult> rates;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  // Fit of the total error in `kind` for one epsilon on the verdict
  // scale of the configured mesh kind.
  const RateResult* find_rate(double epsilon, const std::string& kind,
                              const std::string& scale) const;
};

ConvergenceReport run_study(const StudyConfig& cfg);

void write_csv(const ConvergenceReport& rep, std::ostream& out);
nlohmann::json report_json(const ConvergenceReport& rep);

// Scale the verdicts use for a mesh kind.
std::string verdict_scale(MeshKind kind);

// One solve plus error reports; building block of the study loop.
struct SingleRun {
  Problem problem;
  STypeMesh mesh;
  ReferenceBasis basis;
  DiscreteFunction solution;
  OperatorOutput hybrid;
  StudyRow row;
};

SingleRun run_single(const std::string& problem_id, MeshKind kind, double sigma, int degree,
                     int n, double epsilon, int quad_points = 0);

// Fixed battery of operator checks: coarse-region projection rates,
// trace rates of the constrained projection, ply-cell completion
// bounds, nodal indicator patterns, sup-norm stability of the
// weighted projection and the transition shape-function bounds.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string details;
};

std::vector<CheckResult> run_operator_verification();
nlohmann::json checks_json(const std::vector<CheckResult>& checks);

// Energy versus balanced error comparison across an epsilon sweep at
// fixed N, plus an N sweep of the energy error for fourth-order
// problems.
struct NormComparisonRow {
  double epsilon = 0.0;
  double energy = 0.0;
  double balanced = 0.0;
};

struct NormComparison {
  std::string problem;
  MeshKind mesh_kind = MeshKind::Shishkin;
  int degree = 0;
  double sigma = 0.0;
  int n_fixed = 0;
  std::vector<NormComparisonRow> rows;
  std::vector<Verdict> verdicts;
};

NormComparison compare_energy_vs_balanced(const std::string& problem_id, MeshKind kind,
                                          const std::vector<double>& epsilons, int n_fixed);
nlohmann::json comparison_json(const NormComparison& cmp);

}  // namespace spfem
