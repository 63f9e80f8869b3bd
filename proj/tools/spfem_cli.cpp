// Command line front end: mesh inspection, single solves, convergence
// studies, the operator check battery and the energy/balanced
// comparison.  Exit code 0 means every requested verdict passed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spfem/error.hpp"
#include "spfem/fem.hpp"
#include "spfem/mesh.hpp"
#include "spfem/operators.hpp"
#include "spfem/problems.hpp"
#include "spfem/study.hpp"

namespace {

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) spfem::fail(spfem::Errc::BadConfig, "cannot open '" + path + "' for writing");
  return file;
}

spfem::STypeMesh cli_mesh(const std::string& kind_name, int n, double sigma, double epsilon,
                          int dim) {
  spfem::MeshKind kind = spfem::mesh_kind_from_string(kind_name);
  spfem::MeshGeneratingFunction gen = kind == spfem::MeshKind::BakhvalovS
                                          ? spfem::MeshGeneratingFunction::bakhvalov_s(n)
                                          : spfem::MeshGeneratingFunction::shishkin(n);
  return spfem::build_mesh(gen, spfem::make_transition(epsilon, sigma, n), dim);
}

void print_verdicts(const std::vector<spfem::Verdict>& verdicts) {
  for (const spfem::Verdict& v : verdicts) {
    std::printf("%s %-32s value=%-12.5g target=%g+-%g  %s\n", v.pass ? "PASS" : "FAIL",
                v.name.c_str(), v.value, v.target, v.tolerance, v.details.c_str());
  }
}

int cmd_mesh(const std::string& kind, int n, double sigma, double epsilon, int dim,
             const std::string& out_path, bool nodes_only) {
  spfem::STypeMesh mesh = cli_mesh(kind, n, sigma, epsilon, dim);
  std::ofstream file;
  std::ostream& out = open_or_stdout(out_path, file);
  if (nodes_only)
    spfem::write_nodes_text(mesh, out);
  else
    out << spfem::mesh_descriptor(mesh).dump(2) << '\n';
  return 0;
}

int cmd_solve(const std::string& problem_id, const std::string& kind, int n, double sigma,
              int degree, double epsilon, int quad, int samples, const std::string& out_path) {
  spfem::Problem problem = spfem::problem_by_id(problem_id, epsilon);
  if (sigma == 0.0) sigma = (problem.spec.m == 2 ? 3 : degree) + 1;
  spfem::STypeMesh mesh = cli_mesh(kind, n, sigma, epsilon, problem.spec.dim);
  spfem::ReferenceBasis basis = problem.spec.m == 2 ? spfem::ReferenceBasis::hermite_cubic()
                                                    : spfem::ReferenceBasis::lagrange_gl(degree);
  spfem::DiscreteFunction uh = spfem::galerkin_solve(problem.spec, mesh, basis, quad);

  std::ofstream file;
  std::ostream& out = open_or_stdout(out_path, file);
  char buf[128];
  if (problem.spec.dim == 1) {
    out << "x,value,exact\n";
    for (int i = 0; i <= samples; ++i) {
      const double x = static_cast<double>(i) / samples;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, uh.eval(x, 0),
                    problem.decomposition.exact(x, 0));
      out << buf;
    }
  } else {
    out << "x,y,value,exact\n";
    for (int j = 0; j <= samples; ++j) {
      for (int i = 0; i <= samples; ++i) {
        const double x = static_cast<double>(i) / samples;
        const double y = static_cast<double>(j) / samples;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", x, y, uh.eval(x, y, 0, 0),
                      problem.decomposition.exact(x, y, 0, 0));
        out << buf;
      }
    }
  }
  return 0;
}

int cmd_converge(const spfem::StudyConfig& cfg) {
  spfem::ConvergenceReport rep = spfem::run_study(cfg);
  std::printf("problem=%s mesh=%s p=%d sigma=%g\n", rep.config.problem.c_str(),
              spfem::to_string(rep.config.mesh_kind).c_str(), rep.degree, rep.sigma);
  const std::string scale = spfem::verdict_scale(rep.config.mesh_kind);
  for (double eps : rep.config.epsilons) {
    const spfem::RateResult* r = rep.find_rate(eps, "balanced", scale);
    if (r) std::printf("eps=%-8g balanced rate (%s fit) = %.3f\n", eps, scale.c_str(), r->fit);
  }
  print_verdicts(rep.verdicts);
  return rep.all_pass() ? 0 : 1;
}

int cmd_verify_operators(const std::string& json_path) {
  std::vector<spfem::CheckResult> checks = spfem::run_operator_verification();
  bool all = true;
  for (const spfem::CheckResult& c : checks) {
    all = all && c.pass;
    std::printf("%s %-28s value=%-12.5g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.details.c_str());
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) spfem::fail(spfem::Errc::BadConfig, "cannot open '" + json_path + "' for writing");
    out << spfem::checks_json(checks).dump(2) << '\n';
  }
  return all ? 0 : 1;
}

int cmd_compare_norms(const std::string& problem_id, const std::string& kind, int n,
                      const std::vector<double>& epsilons, const std::string& json_path) {
  spfem::NormComparison cmp = spfem::compare_energy_vs_balanced(
      problem_id, spfem::mesh_kind_from_string(kind), epsilons, n);
  std::printf("epsilon,energy,balanced,balanced_over_energy\n");
  for (const spfem::NormComparisonRow& r : cmp.rows)
    std::printf("%.17g,%.17g,%.17g,%.17g\n", r.epsilon, r.energy, r.balanced,
                r.balanced / r.energy);
  print_verdicts(cmp.verdicts);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) spfem::fail(spfem::Errc::BadConfig, "cannot open '" + json_path + "' for writing");
    out << spfem::comparison_json(cmp).dump(2) << '\n';
  }
  bool all = true;
  for (const spfem::Verdict& v : cmp.verdicts) all = all && v.pass;
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite elements on layer-adapted meshes for singularly perturbed problems"};
  app.require_subcommand(1);

  std::string kind = "shishkin";
  std::string problem_id = "rd1d-const";
  std::string out_path, json_path, config_path;
  int n = 32, dim = 1, degree = 1, quad = 0, samples = 200;
  double sigma = 2.0, epsilon = 1e-4;
  bool nodes_only = false;

  CLI::App* mesh = app.add_subcommand("mesh", "Build a mesh and print its descriptor");
  mesh->add_option("--kind", kind, "shishkin or bakhvalov-s");
  mesh->add_option("--n", n, "cells per direction, multiple of 4");
  mesh->add_option("--sigma", sigma, "layer-resolution constant");
  mesh->add_option("--epsilon", epsilon, "perturbation parameter");
  mesh->add_option("--dim", dim, "1 or 2")->check(CLI::Range(1, 2));
  mesh->add_option("--out", out_path, "write to a file instead of stdout");
  mesh->add_flag("--nodes", nodes_only, "plain node list, one per line");

  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and sample the solution");
  solve->add_option("--problem", problem_id, "catalog id");
  solve->add_option("--kind", kind, "shishkin or bakhvalov-s");
  solve->add_option("--n", n, "cells per direction");
  solve->add_option("--sigma", sigma, "layer-resolution constant (0: degree + 1)");
  solve->add_option("--degree", degree, "polynomial degree (first-order problems)");
  solve->add_option("--epsilon", epsilon, "perturbation parameter");
  solve->add_option("--quad", quad, "quadrature points per direction (0: default)");
  solve->add_option("--samples", samples, "uniform sample count per direction");
  solve->add_option("--out", out_path, "CSV output file (default stdout)");

  spfem::StudyConfig cfg;
  CLI::App* conv = app.add_subcommand("converge", "Run a convergence study");
  conv->add_option("--config", config_path, "JSON config file");
  conv->add_option("--problem", cfg.problem, "catalog id");
  std::string conv_kind;
  conv->add_option("--kind", conv_kind, "shishkin or bakhvalov-s");
  conv->add_option("--sigma", cfg.sigma, "layer-resolution constant (0: degree + 1)");
  conv->add_option("--degree", cfg.degree, "polynomial degree (0: problem default)");
  conv->add_option("--n", cfg.n_values, "cell counts, ascending multiples of 4")
      ->delimiter(',');
  conv->add_option("--eps", cfg.epsilons, "perturbation parameters")->delimiter(',');
  conv->add_option("--quad", cfg.quadrature_order, "quadrature points per direction");
  conv->add_option("--csv", cfg.output_csv, "per-row CSV output file");
  conv->add_option("--json", cfg.output_json, "full report JSON file");
  conv->add_flag("--allow-small-sigma", cfg.allow_small_sigma,
                 "accept sigma below degree + 1");

  CLI::App* verify = app.add_subcommand("verify-operators", "Run the operator check battery");
  verify->add_option("--json", json_path, "write the check results as JSON");

  std::vector<double> cmp_eps = {1e-4, 1e-6, 1e-8};
  CLI::App* cmp = app.add_subcommand("compare-norms",
                                     "Energy versus balanced error across an epsilon sweep");
  cmp->add_option("--problem", problem_id, "catalog id");
  cmp->add_option("--kind", kind, "shishkin or bakhvalov-s");
  cmp->add_option("--n", n, "fixed cell count");
  cmp->add_option("--eps", cmp_eps, "perturbation parameters (at least two)")->delimiter(',');
  cmp->add_option("--json", json_path, "write the comparison as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(mesh)) return cmd_mesh(kind, n, sigma, epsilon, dim, out_path,
                                                  nodes_only);
    if (app.got_subcommand(solve))
      return cmd_solve(problem_id, kind, n, sigma, degree, epsilon, quad, samples, out_path);
    if (app.got_subcommand(conv)) {
      spfem::StudyConfig run_cfg = cfg;
      if (!config_path.empty()) {
        run_cfg = spfem::load_config(config_path);
        // Flag overrides win over the file.
        if (conv->count("--problem")) run_cfg.problem = cfg.problem;
        if (conv->count("--sigma")) run_cfg.sigma = cfg.sigma;
        if (conv->count("--degree")) run_cfg.degree = cfg.degree;
        if (conv->count("--n")) run_cfg.n_values = cfg.n_values;
        if (conv->count("--eps")) run_cfg.epsilons = cfg.epsilons;
        if (conv->count("--quad")) run_cfg.quadrature_order = cfg.quadrature_order;
        if (conv->count("--csv")) run_cfg.output_csv = cfg.output_csv;
        if (conv->count("--json")) run_cfg.output_json = cfg.output_json;
        if (conv->count("--allow-small-sigma")) run_cfg.allow_small_sigma = cfg.allow_small_sigma;
        if (conv->count("--kind")) run_cfg.mesh_kind = spfem::mesh_kind_from_string(conv_kind);
      } else if (conv->count("--kind")) {
        run_cfg.mesh_kind = spfem::mesh_kind_from_string(conv_kind);
      }
      if (run_cfg.n_values.empty()) run_cfg.n_values = {16, 32, 64, 128};
      if (run_cfg.epsilons.empty()) run_cfg.epsilons = {1e-6};
      return cmd_converge(run_cfg);
    }
    if (app.got_subcommand(verify)) return cmd_verify_operators(json_path);
    if (app.got_subcommand(cmp)) return cmd_compare_norms(problem_id, kind, n, cmp_eps,
                                                          json_path);
  } catch (const spfem::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", spfem::to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
