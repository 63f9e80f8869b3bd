#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "spfem/error.hpp"
#include "spfem/study.hpp"

using namespace spfem;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::BadConfig;
}

}  // namespace

TEST_CASE("config parsing fills defaults") {
  nlohmann::json j = {{"problem", "rd1d-const"},
                      {"mesh_kind", "shishkin"},
                      {"n_values", {16, 32, 64}},
                      {"epsilons", {1e-6}}};
  StudyConfig cfg = config_from_json(j);
  finalize_config(cfg);
  CHECK(cfg.degree == 1);
  CHECK(cfg.sigma == 2.0);
  CHECK(cfg.mesh_kind == MeshKind::Shishkin);
  REQUIRE(!cfg.norms.empty());
  // m = 1 catalog entries report every first-order norm kind.
  CHECK(std::count(cfg.norms.begin(), cfg.norms.end(), "balanced") == 1);
  CHECK(std::count(cfg.norms.begin(), cfg.norms.end(), "h2") == 0);

  nlohmann::json j4 = {{"problem", "fourth1d-k1"}, {"n_values", {16, 32}}, {"epsilons", {1e-5}}};
  StudyConfig cfg4 = config_from_json(j4);
  finalize_config(cfg4);
  CHECK(cfg4.degree == 3);
  CHECK(cfg4.sigma == 4.0);
  CHECK(std::count(cfg4.norms.begin(), cfg4.norms.end(), "h2") == 1);
}

TEST_CASE("config validation rejects bad input") {
  auto base = [] {
    StudyConfig cfg;
    cfg.problem = "rd1d-const";
    cfg.n_values = {16, 32};
    cfg.epsilons = {1e-5};
    return cfg;
  };

  CHECK(code_of([&] {
          nlohmann::json j = {{"problem", "rd1d-const"}, {"unknown_key", 1}};
          config_from_json(j);
        }) == Errc::BadConfig);

  StudyConfig bad_n = base();
  bad_n.n_values = {16, 15};
  CHECK(code_of([&] { finalize_config(bad_n); }) == Errc::BadConfig);

  StudyConfig unordered = base();
  unordered.n_values = {32, 16};
  CHECK(code_of([&] { finalize_config(unordered); }) == Errc::BadConfig);

  StudyConfig bad_eps = base();
  bad_eps.epsilons = {0.5};
  CHECK(code_of([&] { finalize_config(bad_eps); }) == Errc::BadConfig);

  StudyConfig small_sigma = base();
  small_sigma.degree = 2;
  small_sigma.sigma = 1.5;
  CHECK(code_of([&] { finalize_config(small_sigma); }) == Errc::BadConfig);
  small_sigma.allow_small_sigma = true;
  finalize_config(small_sigma);  // explicitly allowed

  StudyConfig h2_first_order = base();
  h2_first_order.norms = {"h2"};
  CHECK(code_of([&] { finalize_config(h2_first_order); }) == Errc::BadConfig);

  StudyConfig wrong_degree = base();
  wrong_degree.problem = "fourth1d-k1";
  wrong_degree.degree = 2;
  CHECK(code_of([&] { finalize_config(wrong_degree); }) == Errc::BadConfig);

  StudyConfig custom_kind = base();
  custom_kind.mesh_kind = MeshKind::Custom;
  CHECK(code_of([&] { finalize_config(custom_kind); }) == Errc::BadConfig);

  StudyConfig bad_problem = base();
  bad_problem.problem = "unknown";
  CHECK(code_of([&] { finalize_config(bad_problem); }) == Errc::BadConfig);
}

TEST_CASE("verdict scales follow the mesh kind") {
  CHECK(verdict_scale(MeshKind::Shishkin) == "n_inv_log_n");
  CHECK(verdict_scale(MeshKind::BakhvalovS) == "n_inv");
}

TEST_CASE("single runs populate the row geometry") {
  SingleRun run = run_single("rd1d-const", MeshKind::Shishkin, 2.0, 1, 16, 1e-4);
  CHECK(run.row.n == 16);
  CHECK(run.row.epsilon == 1e-4);
  CHECK(run.row.lambda == doctest::Approx(2.0 * 1e-4 * std::log(16.0)).epsilon(1e-14));
  CHECK(run.row.h > 0.0);
  CHECK(run.row.max_psi_prime == doctest::Approx(2.0 * std::log(16.0)).epsilon(1e-14));
  CHECK(run.row.total.balanced > 0.0);
  CHECK(run.row.interpolation.balanced > 0.0);
  CHECK(run.row.discrete.balanced > 0.0);
  // Triangle inequality between the three components.
  CHECK(run.row.total.balanced <=
        run.row.interpolation.balanced + run.row.discrete.balanced + 1e-12);
  CHECK(run.mesh.n() == 16);
  CHECK(run.problem.id == "rd1d-const");
}

TEST_CASE("a small bakhvalov study converges at first order") {
  StudyConfig cfg;
  cfg.problem = "rd1d-const";
  cfg.mesh_kind = MeshKind::BakhvalovS;
  cfg.n_values = {16, 32, 64};
  cfg.epsilons = {1e-5};
  finalize_config(cfg);

  ConvergenceReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.m == 1);
  CHECK(rep.k == 1);
  CHECK(rep.degree == 1);

  const RateResult* rate = rep.find_rate(1e-5, "balanced", "n_inv");
  REQUIRE(rate != nullptr);
  CHECK(rate->fit > 0.7);
  CHECK(rate->fit < 1.3);
  CHECK(rep.all_pass());

  // Errors decrease monotonically in N.
  for (size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].total.balanced < rep.rows[i - 1].total.balanced);
}

TEST_CASE("csv output is deterministic with a fixed header") {
  StudyConfig cfg;
  cfg.problem = "rd1d-const";
  cfg.n_values = {16, 32};
  cfg.epsilons = {1e-4};
  finalize_config(cfg);
  ConvergenceReport rep = run_study(cfg);

  std::ostringstream a, b;
  write_csv(rep, a);
  write_csv(run_study(cfg), b);
  CHECK(a.str() == b.str());

  std::istringstream is(a.str());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "problem,mesh,p,sigma,N,epsilon,lambda,h,max_psi_prime,norm_kind,region,component,value");
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  // 2 runs x |norms| kinds x 3 components.
  CHECK(rows == 2 * static_cast<int>(cfg.norms.size()) * 3);
}

TEST_CASE("json report carries rows, rates and verdicts") {
  StudyConfig cfg;
  cfg.problem = "rd1d-const";
  cfg.n_values = {16, 32};
  cfg.epsilons = {1e-4};
  finalize_config(cfg);
  ConvergenceReport rep = run_study(cfg);
  nlohmann::json j = report_json(rep);

  CHECK(j.contains("config"));
  CHECK(j.contains("rows"));
  CHECK(j.contains("rates"));
  CHECK(j.contains("verdicts"));
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0].contains("total"));
  CHECK(j["config"]["problem"] == "rd1d-const");
  bool has_balanced_verdict = false;
  for (const auto& v : j["verdicts"])
    if (v["name"].get<std::string>().rfind("balanced_rate", 0) == 0) has_balanced_verdict = true;
  CHECK(has_balanced_verdict);
}

TEST_CASE("operator verification battery passes") {
  std::vector<CheckResult> checks = run_operator_verification();
  CHECK(checks.size() >= 14);
  for (const CheckResult& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.details);
    CHECK(c.pass);
  }
  nlohmann::json j = checks_json(checks);
  CHECK(j.is_array());
  CHECK(j.size() == checks.size());
}

TEST_CASE("norm comparison separates energy from balanced") {
  NormComparison cmp =
      compare_energy_vs_balanced("rd1d-const", MeshKind::Shishkin, {1e-4, 1e-6}, 64);
  REQUIRE(cmp.rows.size() == 2);
  // Balanced errors stay flat across epsilon, energy errors shrink
  // with sqrt(eps).
  const double bal_ratio = cmp.rows[0].balanced / cmp.rows[1].balanced;
  CHECK(bal_ratio > 0.8);
  CHECK(bal_ratio < 1.25);
  const double en_ratio = cmp.rows[0].energy / cmp.rows[1].energy;
  CHECK(en_ratio > 3.0);  // sqrt(1e-4 / 1e-6) = 10 up to constants
  for (const Verdict& v : cmp.verdicts) {
    CAPTURE(v.name);
    CHECK(v.pass);
  }
  nlohmann::json j = comparison_json(cmp);
  CHECK(j.contains("rows"));
  CHECK(j.contains("verdicts"));
}

TEST_CASE("load_config reports missing files") {
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == Errc::BadConfig);
}
