#include "spfem/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "spfem/error.hpp"
#include "spfem/quadrature.hpp"

namespace spfem {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

const std::vector<std::string>& known_norms() {
  static const std::vector<std::string> kinds = {"l2", "h1", "h2", "linf", "energy", "balanced"};
  return kinds;
}

}  // namespace

StudyConfig config_from_json(const nlohmann::json& j) {
  StudyConfig cfg;
  const std::vector<std::string> known_keys = {
      "problem", "mesh_kind", "sigma",      "degree",      "n_values",         "epsilons",
      "norms",   "output_csv", "output_json", "quadrature_order", "allow_small_sigma"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known_keys.begin(), known_keys.end(), it.key()) == known_keys.end())
      fail(Errc::BadConfig, "unknown config key '" + it.key() + "'");
  }

  try {
    if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
    if (j.contains("mesh_kind"))
      cfg.mesh_kind = mesh_kind_from_string(j.at("mesh_kind").get<std::string>());
    if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
    if (j.contains("degree")) cfg.degree = j.at("degree").get<int>();
    if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("epsilons")) cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("norms")) cfg.norms = j.at("norms").get<std::vector<std::string>>();
    if (j.contains("output_csv")) cfg.output_csv = j.at("output_csv").get<std::string>();
    if (j.contains("output_json")) cfg.output_json = j.at("output_json").get<std::string>();
    if (j.contains("quadrature_order")) cfg.quadrature_order = j.at("quadrature_order").get<int>();
    if (j.contains("allow_small_sigma"))
      cfg.allow_small_sigma = j.at("allow_small_sigma").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadConfig, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::BadConfig, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void finalize_config(StudyConfig& cfg) {
  Problem probe = problem_by_id(cfg.problem, 0.25 / 64.0);
  const int m = probe.spec.m;

  if (cfg.degree == 0) cfg.degree = m == 2 ? 3 : 1;
  if (m == 2 && cfg.degree != 3)
    fail(Errc::BadConfig, "fourth-order problems use the cubic Hermite space (degree 3)");
  if (m == 1 && (cfg.degree < 1 || cfg.degree > 4))
    fail(Errc::BadConfig, "degree must lie in [1, 4]");

  if (cfg.sigma == 0.0) cfg.sigma = cfg.degree + 1;
  if (!(cfg.sigma > 0.0)) fail(Errc::BadConfig, "sigma must be positive");
  if (cfg.sigma < cfg.degree + 1 && !cfg.allow_small_sigma)
    fail(Errc::BadConfig,
         "sigma below degree + 1 weakens the layer resolution; pass allow_small_sigma to force");

  if (cfg.n_values.empty()) fail(Errc::BadConfig, "n_values must not be empty");
  for (size_t i = 0; i < cfg.n_values.size(); ++i) {
    if (cfg.n_values[i] < 4 || cfg.n_values[i] % 4 != 0)
      fail(Errc::BadConfig, "every N must be a positive multiple of 4");
    if (i > 0 && cfg.n_values[i] <= cfg.n_values[i - 1])
      fail(Errc::BadConfig, "n_values must be strictly increasing");
  }

  if (cfg.epsilons.empty()) fail(Errc::BadConfig, "epsilons must not be empty");
  for (double e : cfg.epsilons)
    if (!(e > 0.0) || e > 0.25) fail(Errc::BadConfig, "epsilons must lie in (0, 1/4]");

  if (cfg.norms.empty()) {
    cfg.norms = {"l2", "h1", "linf", "energy", "balanced"};
    if (m == 2) cfg.norms.insert(cfg.norms.begin() + 2, "h2");
  }
  for (const std::string& kind : cfg.norms) {
    if (std::find(known_norms().begin(), known_norms().end(), kind) == known_norms().end())
      fail(Errc::BadConfig, "unknown norm kind '" + kind + "'");
    if (kind == "h2" && m == 1)
      fail(Errc::BadConfig, "h2 is only defined for fourth-order problems");
  }

  if (cfg.quadrature_order < 0 || cfg.quadrature_order > 40)
    fail(Errc::BadConfig, "quadrature_order must lie in [0, 40]");
  if (cfg.mesh_kind == MeshKind::Custom)
    fail(Errc::BadConfig, "custom generating functions are available through the API only");
}

std::string verdict_scale(MeshKind kind) {
  switch (kind) {
    case MeshKind::Shishkin: return "n_inv_log_n";
    case MeshKind::BakhvalovS: return "n_inv";
    case MeshKind::Custom: return "general";
  }
  return "general";
}

SingleRun run_single(const std::string& problem_id, MeshKind kind, double sigma, int degree,
                     int n, double epsilon, int quad_points) {
  SingleRun run{problem_by_id(problem_id, epsilon), {}, ReferenceBasis::lagrange_gl(1), {}, {}, {}};
  const ProblemSpec& spec = run.problem.spec;
  run.basis =
      spec.m == 2 ? ReferenceBasis::hermite_cubic() : ReferenceBasis::lagrange_gl(degree);

  MeshGeneratingFunction gen = kind == MeshKind::BakhvalovS
                                   ? MeshGeneratingFunction::bakhvalov_s(n)
                                   : MeshGeneratingFunction::shishkin(n);
  run.mesh = build_mesh(gen, make_transition(epsilon, sigma, n), spec.dim);

  run.solution = galerkin_solve(spec, run.mesh, run.basis, quad_points);
  run.hybrid = hybrid_interpolant(run.problem, run.mesh, run.basis, quad_points);

  Field exact = run.problem.decomposition.exact;
  Field uh = run.solution.as_field();
  Field pu = run.hybrid.result.as_field();

  NormSetup setup{spec.m, spec.k, epsilon,
                  quad_points > 0 ? quad_points : default_quad_points(run.basis.degree())};
  run.row.epsilon = epsilon;
  run.row.n = n;
  run.row.lambda = run.mesh.lambda();
  run.row.h = run.mesh.h;
  run.row.max_psi_prime = max_psi_prime(gen, n);
  run.row.total = norm_of_difference(exact, uh, run.mesh, Region::All, setup);
  run.row.interpolation = norm_of_difference(exact, pu, run.mesh, Region::All, setup);
  run.row.discrete = norm_of_difference(pu, uh, run.mesh, Region::All, setup);
  return run;
}

namespace {

const NormReport& component_report(const StudyRow& row, const std::string& component) {
  if (component == "total") return row.total;
  if (component == "interpolation") return row.interpolation;
  return row.discrete;
}

std::vector<double> scale_factors(const std::vector<StudyRow>& rows) {
  std::vector<double> s;
  for (const StudyRow& r : rows) s.push_back(r.h + r.max_psi_prime / r.n);
  return s;
}

double triangle_violation(const StudyRow& row, const std::string& kind) {
  const double t = row.total.by_name(kind);
  const double i = row.interpolation.by_name(kind);
  const double d = row.discrete.by_name(kind);
  double worst = 0.0;
  worst = std::max(worst, t - (i + d));
  worst = std::max(worst, i - (t + d));
  worst = std::max(worst, d - (t + i));
  return worst / std::max(1.0, std::max(t, std::max(i, d)));
}

}  // namespace

bool ConvergenceReport::all_pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

const RateResult* ConvergenceReport::find_rate(double epsilon, const std::string& kind,
                                               const std::string& scale) const {
  for (const RateResult& r : rates)
    if (r.epsilon == epsilon && r.norm_kind == kind && r.scale == scale &&
        r.component == "total")
      return &r;
  return nullptr;
}

ConvergenceReport run_study(const StudyConfig& raw) {
  StudyConfig cfg = raw;
  finalize_config(cfg);

  ConvergenceReport rep;
  rep.config = cfg;
  rep.degree = cfg.degree;
  rep.sigma = cfg.sigma;
  {
    Problem probe = problem_by_id(cfg.problem, cfg.epsilons.front());
    rep.m = probe.spec.m;
    rep.k = probe.spec.k;
  }

  for (double eps : cfg.epsilons)
    for (int n : cfg.n_values)
      rep.rows.push_back(run_single(cfg.problem, cfg.mesh_kind, cfg.sigma, cfg.degree, n, eps,
                                    cfg.quadrature_order)
                             .row);

  const size_t per_eps = cfg.n_values.size();
  if (per_eps >= 2) {
    for (size_t e = 0; e < cfg.epsilons.size(); ++e) {
      std::vector<StudyRow> rows(rep.rows.begin() + e * per_eps,
                                 rep.rows.begin() + (e + 1) * per_eps);
      std::vector<std::pair<std::string, RateScale>> scales = {
          {"n_inv", RateScale::n_inv()},
          {"n_inv_log_n", RateScale::n_inv_log_n()},
          {"general", RateScale::general(scale_factors(rows))}};
      for (const std::string& kind : cfg.norms) {
        for (const std::string& component : {std::string("total"), std::string("interpolation")}) {
          for (const auto& [scale_name, scale] : scales) {
            std::vector<double> errs;
            bool positive = true;
            for (const StudyRow& r : rows) {
              double v = component_report(r, component).by_name(kind);
              if (!(v > 0.0)) positive = false;
              errs.push_back(v);
            }
            if (!positive) continue;  // a vanishing error has no log-log slope
            RateFit fit = rate_fit(cfg.n_values, errs, scale);
            rep.rates.push_back(
                {cfg.epsilons[e], kind, component, scale_name, fit.slope, fit.pairwise});
          }
        }
      }
    }

    // Balanced-norm convergence verdict per epsilon on the scale the
    // mesh kind is expected to follow.
    const std::string scale = verdict_scale(cfg.mesh_kind);
    const double target = rep.m == 1 ? cfg.degree : cfg.degree + 1 - rep.m;
    for (double eps : cfg.epsilons) {
      const RateResult* r = rep.find_rate(eps, "balanced", scale);
      if (!r) continue;
      Verdict v;
      v.name = "balanced_rate[eps=" + fmt_short(eps) + "]";
      v.value = r->fit;
      v.target = target;
      v.tolerance = 0.25;
      const double last_pair = r->pairwise.back();
      v.pass = std::abs(r->fit - target) <= 0.25 && std::abs(last_pair - target) <= 0.35;
      v.details = "scale=" + scale + " last_pairwise=" + fmt_short(last_pair);
      rep.verdicts.push_back(v);
    }
  }

  if (cfg.epsilons.size() >= 2) {
    double worst = 0.0;
    for (size_t i = 0; i < cfg.n_values.size(); ++i) {
      double lo = 0.0, hi = 0.0;
      for (size_t e = 0; e < cfg.epsilons.size(); ++e) {
        double v = rep.rows[e * per_eps + i].total.balanced;
        if (e == 0) {
          lo = hi = v;
        } else {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (lo > 0.0) worst = std::max(worst, hi / lo);
    }
    Verdict v;
    v.name = "balanced_eps_uniformity";
    v.value = worst;
    v.target = 1.0;
    v.tolerance = 0.2;
    v.pass = worst <= 1.2;
    v.details = "max over N of (max/min over eps) of the balanced error";
    rep.verdicts.push_back(v);
  }

  {
    double worst = 0.0;
    for (const StudyRow& r : rep.rows)
      for (const char* kind : {"l2", "energy", "balanced"})
        worst = std::max(worst, triangle_violation(r, kind));
    Verdict v;
    v.name = "triangle_consistency";
    v.value = worst;
    v.target = 0.0;
    v.tolerance = 1e-9;
    v.pass = worst <= 1e-9;
    v.details = "interpolation/discrete split against the total error";
    rep.verdicts.push_back(v);
  }

  if (!cfg.output_csv.empty()) {
    std::ofstream out(cfg.output_csv);
    if (!out) fail(Errc::BadConfig, "cannot open '" + cfg.output_csv + "' for writing");
    write_csv(rep, out);
  }
  if (!cfg.output_json.empty()) {
    std::ofstream out(cfg.output_json);
    if (!out) fail(Errc::BadConfig, "cannot open '" + cfg.output_json + "' for writing");
    out << report_json(rep).dump(2) << '\n';
  }
  return rep;
}

void write_csv(const ConvergenceReport& rep, std::ostream& out) {
  out << "problem,mesh,p,sigma,N,epsilon,lambda,h,max_psi_prime,norm_kind,region,component,"
         "value\n";
  for (const StudyRow& row : rep.rows) {
    for (const std::string& kind : rep.config.norms) {
      for (const char* component : {"total", "interpolation", "discrete"}) {
        const NormReport& r = component_report(row, component);
        out << rep.config.problem << ',' << to_string(rep.config.mesh_kind) << ',' << rep.degree
            << ',' << fmt(rep.sigma) << ',' << row.n << ',' << fmt(row.epsilon) << ','
            << fmt(row.lambda) << ',' << fmt(row.h) << ',' << fmt(row.max_psi_prime) << ','
            << kind << ',' << r.region << ',' << component << ',' << fmt(r.by_name(kind))
            << '\n';
      }
    }
  }
}

namespace {

nlohmann::json report_row_json(const StudyRow& row, const std::vector<std::string>& kinds) {
  nlohmann::json j;
  j["n"] = row.n;
  j["epsilon"] = row.epsilon;
  j["lambda"] = row.lambda;
  j["h"] = row.h;
  j["max_psi_prime"] = row.max_psi_prime;
  for (const char* component : {"total", "interpolation", "discrete"}) {
    const NormReport& r = component_report(row, component);
    nlohmann::json c;
    for (const std::string& kind : kinds) c[kind] = r.by_name(kind);
    j[component] = c;
  }
  return j;
}

nlohmann::json verdict_json(const Verdict& v) {
  return {{"name", v.name},   {"pass", v.pass},           {"value", v.value},
          {"target", v.target}, {"tolerance", v.tolerance}, {"details", v.details}};
}

}  // namespace

nlohmann::json report_json(const ConvergenceReport& rep) {
  nlohmann::json j;
  j["config"] = {{"problem", rep.config.problem},
                 {"mesh_kind", to_string(rep.config.mesh_kind)},
                 {"sigma", rep.sigma},
                 {"degree", rep.degree},
                 {"n_values", rep.config.n_values},
                 {"epsilons", rep.config.epsilons},
                 {"norms", rep.config.norms},
                 {"quadrature_order", rep.config.quadrature_order},
                 {"allow_small_sigma", rep.config.allow_small_sigma}};
  j["order"] = {{"m", rep.m}, {"k", rep.k}};

  j["rows"] = nlohmann::json::array();
  for (const StudyRow& row : rep.rows) j["rows"].push_back(report_row_json(row, rep.config.norms));

  j["rates"] = nlohmann::json::array();
  for (const RateResult& r : rep.rates)
    j["rates"].push_back({{"epsilon", r.epsilon},
                          {"norm_kind", r.norm_kind},
                          {"component", r.component},
                          {"scale", r.scale},
                          {"fit", r.fit},
                          {"pairwise", r.pairwise}});

  j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : rep.verdicts) j["verdicts"].push_back(verdict_json(v));
  j["all_pass"] = rep.all_pass();
  return j;
}

// ---------------------------------------------------------------
// Operator verification battery.
// ---------------------------------------------------------------

namespace {

STypeMesh quick_mesh(MeshKind kind, int n, double sigma, double eps, int dim = 1) {
  MeshGeneratingFunction gen = kind == MeshKind::BakhvalovS
                                   ? MeshGeneratingFunction::bakhvalov_s(n)
                                   : MeshGeneratingFunction::shishkin(n);
  return build_mesh(gen, make_transition(eps, sigma, n), dim);
}

// sup over the coarse cells of |a - b| on a dense per-cell sample.
double sup_coarse(const STypeMesh& mesh, const std::function<double(double)>& a,
                  const std::function<double(double)>& b) {
  double sup = 0.0;
  for (int cx = 0; cx < mesh.n(); ++cx) {
    if (classify_cell(mesh, cx) != CellClass::Coarse) continue;
    const double xl = mesh.grid.x[cx], xr = mesh.grid.x[cx + 1];
    for (int s = 0; s <= 16; ++s) {
      const double x = xl + (xr - xl) * s / 16.0;
      sup = std::max(sup, std::abs(a(x) - b(x)));
    }
  }
  return sup;
}

// W^{j,inf} seminorm-style sup of a coefficient-difference function
// restricted to one cell.
double sup_on_cell(const DiscreteFunction& f, int cx, int deriv) {
  const double xl = f.grid().x[cx], xr = f.grid().x[cx + 1];
  double sup = 0.0;
  for (int s = 0; s <= 64; ++s) {
    const double x = xl + (xr - xl) * s / 64.0;
    sup = std::max(sup, std::abs(f.eval_on_cell(cx, deriv, x)));
  }
  return sup;
}

DiscreteFunction coefficient_difference(const DiscreteFunction& a, const DiscreteFunction& b) {
  return DiscreteFunction(a.grid(), a.basis(), a.dofs(), a.coeffs() - b.coeffs());
}

CheckResult rate_check(const std::string& name, const std::vector<int>& ns,
                       const std::vector<double>& errs, double target, bool two_sided,
                       double tol) {
  CheckResult res;
  res.name = name;
  RateFit fit = rate_fit(ns, errs, RateScale::n_inv());
  res.value = fit.slope;
  res.pass = two_sided ? std::abs(fit.slope - target) <= tol : fit.slope >= target - tol;
  std::ostringstream os;
  os << "rate " << fmt_short(fit.slope) << " vs target " << fmt_short(target) << " (";
  for (size_t i = 0; i < errs.size(); ++i) os << (i ? " " : "") << fmt_short(errs[i]);
  os << ")";
  res.details = os.str();
  return res;
}

}  // namespace

std::vector<CheckResult> run_operator_verification() {
  std::vector<CheckResult> out;
  const double eps = 1e-6;
  const std::vector<int> ns = {16, 32, 64, 128};

  // Interpolant versus weighted projection of a smooth function at
  // the two ends of the coarse region, expected order at least p + 1.
  for (int p : {1, 2}) {
    Problem prob = problem_by_id("rd1d-varc", eps);
    ReferenceBasis basis = ReferenceBasis::lagrange_gl(p);
    std::vector<double> errs;
    for (int n : ns) {
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, p + 1, eps);
      DiscreteFunction interp = interpolate_gl(prob.decomposition.smooth, mesh, basis);
      DiscreteFunction proj =
          weighted_l2_projection(prob.decomposition.smooth, mesh, prob.spec.c, basis);
      double e = 0.0;
      for (double x : {mesh.lambda(), 1.0 - mesh.lambda()})
        e = std::max(e, std::abs(interp.eval(x, 0) - proj.eval(x, 0)));
      errs.push_back(e);
    }
    out.push_back(rate_check("projection_trace_p" + std::to_string(p), ns, errs, p + 1.0,
                             false, 0.3));
  }

  // Constrained projection of the smooth part, sup error over the
  // coarse region, expected order at least p + 1 = 4.
  for (int k : {1, 2}) {
    Problem prob = problem_by_id("fourth1d-k2", eps);
    LowerForm form = k == 1 ? LowerForm::GradGrad : LowerForm::Mass;
    std::vector<double> errs;
    for (int n : ns) {
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, 4.0, eps);
      DiscreteFunction proj = ritz_projection(prob.decomposition.smooth, mesh, form, 2, k);
      errs.push_back(sup_coarse(
          mesh, [&](double x) { return prob.decomposition.smooth(x, 0); },
          [&](double x) { return proj.eval(x, 0); }));
    }
    out.push_back(
        rate_check("ritz_sup_k" + std::to_string(k), ns, errs, 4.0, false, 0.3));
  }

  // Smooth-part completion defect on the ply cell, W^{m-k,inf},
  // expected order at least m + k.
  for (int k : {1, 2}) {
    Problem prob = problem_by_id("fourth1d-k2", eps);
    LowerForm form = k == 1 ? LowerForm::GradGrad : LowerForm::Mass;
    ReferenceBasis basis = ReferenceBasis::hermite_cubic();
    std::vector<double> errs;
    for (int n : ns) {
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, 4.0, eps);
      Field zero = Field::zero(1);
      OperatorOutput pv = hybrid_parts(prob.decomposition.smooth, zero, mesh, basis, 2, k, form,
                                       Field());
      DiscreteFunction interp = interpolate_hermite(prob.decomposition.smooth, mesh);
      DiscreteFunction diff = coefficient_difference(interp, pv.result);
      const int ply = mesh.n() / 4 - 1;
      const double dscale = k == 1 ? 1.0 : mesh.h;
      errs.push_back(sup_on_cell(diff, ply, 0) + dscale * sup_on_cell(diff, ply, 1));
    }
    out.push_back(rate_check("completion_smooth_ply_k" + std::to_string(k), ns, errs, 2.0 + k,
                             false, 0.3));
  }

  // Layer-part completion defect on the ply cell, expected order at
  // least sigma - (m - k).
  for (int k : {1, 2}) {
    ReferenceBasis basis = ReferenceBasis::hermite_cubic();
    LowerForm form = k == 1 ? LowerForm::GradGrad : LowerForm::Mass;
    std::vector<double> errs;
    for (int n : ns) {
      Problem prob = problem_by_id(k == 1 ? "fourth1d-k1" : "fourth1d-k2", eps);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, 4.0, eps);
      Field layer = field_sum(prob.decomposition.layers);
      OperatorOutput pw = hybrid_parts(Field::zero(1), layer, mesh, basis, 2, k, form, Field());
      DiscreteFunction interp = interpolate_hermite(layer, mesh);
      DiscreteFunction diff = coefficient_difference(interp, pw.result);
      const int ply = mesh.n() / 4 - 1;
      const double dscale = k == 1 ? 1.0 : mesh.h;
      errs.push_back(sup_on_cell(diff, ply, 0) + dscale * sup_on_cell(diff, ply, 1));
    }
    const double target = 4.0 - (2.0 - k);
    out.push_back(rate_check("completion_layer_ply_k" + std::to_string(k), ns, errs, target,
                             false, 0.3));
  }

  // First-order analog on the Lagrange space.
  {
    ReferenceBasis basis = ReferenceBasis::lagrange_gl(1);
    std::vector<double> errs;
    for (int n : ns) {
      Problem prob = problem_by_id("rd1d-const", eps);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, 2.0, eps);
      Field layer = field_sum(prob.decomposition.layers);
      OperatorOutput pw = hybrid_parts(Field::zero(1), layer, mesh, basis, 1, 1,
                                       LowerForm::WeightedMass, prob.spec.c);
      DiscreteFunction interp = interpolate_gl(layer, mesh, basis);
      DiscreteFunction diff = coefficient_difference(interp, pw.result);
      errs.push_back(sup_on_cell(diff, mesh.n() / 4 - 1, 0));
    }
    out.push_back(rate_check("completion_layer_ply_m1", ns, errs, 2.0, false, 0.3));
  }

  // Nodal indicator pattern on every ply cell.
  {
    CheckResult res;
    res.name = "indicator_pattern";
    int mismatches = 0;
    for (int p : {1, 2}) {
      ReferenceBasis basis = ReferenceBasis::lagrange_gl(p);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, 16, p + 1.0, 1e-3);
      for (int cx : {mesh.n() / 4 - 1, 3 * mesh.n() / 4}) {
        NodalIndicator ind = chi_tau(mesh, basis, cx);
        const int hot = cx == mesh.n() / 4 - 1 ? p : 0;
        for (int a = 0; a <= p; ++a)
          if (ind.coeffs[a] != (a == hot ? 1.0 : 0.0)) ++mismatches;
      }
    }
    {
      ReferenceBasis basis = ReferenceBasis::lagrange_gl(1);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, 16, 2.0, 1e-3, 2);
      const int n = mesh.n();
      // Edge ply cell: the transition side carries p + 1 hot nodes.
      NodalIndicator edge = chi_tau(mesh, basis, n / 4 - 1, n / 2);
      int hot = 0;
      for (Eigen::Index i = 0; i < edge.coeffs.size(); ++i) hot += edge.coeffs[i] == 1.0;
      if (hot != 2 || edge.coeffs[1] != 1.0 || edge.coeffs[3] != 1.0) ++mismatches;
      // Corner ply cell: exactly one hot node at the corner of the
      // coarse region.
      NodalIndicator corner = chi_tau(mesh, basis, n / 4 - 1, n / 4 - 1);
      hot = 0;
      for (Eigen::Index i = 0; i < corner.coeffs.size(); ++i) hot += corner.coeffs[i] == 1.0;
      if (hot != 1 || corner.coeffs[3] != 1.0) ++mismatches;
    }
    res.value = mismatches;
    res.pass = mismatches == 0;
    res.details = "hot-node placement on ply cells";
    out.push_back(res);
  }

  // Sup-norm stability of the weighted projection on the coarse
  // region, estimated over random trigonometric inputs.
  {
    CheckResult res;
    res.name = "projection_sup_stability";
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Problem prob = problem_by_id("rd1d-varc", 1e-4);
    double worst = 0.0;
    for (int p : {1, 2}) {
      ReferenceBasis basis = ReferenceBasis::lagrange_gl(p);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, 32, p + 1.0, 1e-4);
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(5), b(5);
        for (int j = 0; j < 5; ++j) {
          a[j] = dist(rng);
          b[j] = dist(rng);
        }
        Field u = Field::analytic(
            [a, b](double x, int) {
              double s = 0.0;
              for (int j = 0; j < 5; ++j)
                s += a[j] * std::cos((j + 1) * std::numbers::pi * x) +
                     b[j] * std::sin((j + 1) * std::numbers::pi * x);
              return s;
            },
            0);
        DiscreteFunction proj = weighted_l2_projection(u, mesh, prob.spec.c, basis);
        double sup_u = sup_coarse(mesh, [&](double x) { return u(x, 0); },
                                  [](double) { return 0.0; });
        double sup_p = sup_coarse(mesh, [&](double x) { return proj.eval(x, 0); },
                                  [](double) { return 0.0; });
        if (sup_u > 0.0) worst = std::max(worst, sup_p / sup_u);
      }
    }
    res.value = worst;
    res.pass = worst <= 10.0;
    res.details = "largest sup-norm amplification over 20 random inputs";
    out.push_back(res);
  }

  // Transition shape-function norms against C h^n (1 + h^{-(m-k)}).
  {
    CheckResult res;
    res.name = "shape_norm_bounds";
    double worst = 0.0;
    for (int m : {1, 2}) {
      for (int k = 1; k <= m; ++k) {
        for (double h : {1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0}) {
          Eigen::VectorXd norms = hermite_transition_norms(m, k, h);
          for (int n = 0; n < m; ++n) {
            double bound = 3.0 * std::pow(h, n) * (1.0 + std::pow(h, -(m - k)));
            worst = std::max(worst, norms[n] / bound);
          }
        }
      }
    }
    res.value = worst;
    res.pass = worst <= 1.0;
    res.details = "largest norm relative to the C = 3 envelope";
    out.push_back(res);
  }

  // Conformity of the hybrid interpolant across every interface, and
  // its prescribed behavior per region.
  {
    CheckResult res;
    res.name = "hybrid_conformity";
    double worst = 0.0;
    for (const std::string& id : catalog_ids()) {
      Problem prob = problem_by_id(id, 1e-4);
      const int n = prob.spec.dim == 2 ? 8 : 16;
      const double sigma = prob.spec.m == 2 ? 4.0 : 2.0;
      ReferenceBasis basis = prob.spec.m == 2 ? ReferenceBasis::hermite_cubic()
                                              : ReferenceBasis::lagrange_gl(1);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, n, sigma, 1e-4, prob.spec.dim);
      OperatorOutput op = hybrid_interpolant(prob, mesh, basis);
      if (prob.spec.dim == 1) {
        for (int cx = 0; cx + 1 < mesh.n(); ++cx) {
          const double x = mesh.grid.x[cx + 1];
          for (int d = 0; d <= (prob.spec.m == 2 ? 1 : 0); ++d)
            worst = std::max(worst, std::abs(op.result.eval_on_cell(cx, d, x) -
                                             op.result.eval_on_cell(cx + 1, d, x)));
        }
      } else {
        for (int cy = 0; cy < mesh.n(); ++cy) {
          for (int cx = 0; cx + 1 < mesh.n(); ++cx) {
            const double x = mesh.grid.x[cx + 1];
            const double ym = 0.5 * (mesh.grid.y[cy] + mesh.grid.y[cy + 1]);
            worst = std::max(worst, std::abs(op.result.eval_on_cell(cx, cy, 0, 0, x, ym) -
                                             op.result.eval_on_cell(cx + 1, cy, 0, 0, x, ym)));
          }
        }
      }
    }
    res.value = worst;
    res.pass = worst <= 1e-10;
    res.details = "largest jump across cell interfaces";
    out.push_back(res);
  }

  // The layer part of the operator vanishes identically on the coarse
  // cells, and the interpolation branch is exact on the layer cells.
  {
    CheckResult res;
    res.name = "hybrid_region_branches";
    double worst = 0.0;
    for (const std::string& id : {std::string("rd1d-const"), std::string("fourth1d-k1")}) {
      Problem prob = problem_by_id(id, 1e-4);
      ReferenceBasis basis = prob.spec.m == 2 ? ReferenceBasis::hermite_cubic()
                                              : ReferenceBasis::lagrange_gl(1);
      STypeMesh mesh = quick_mesh(MeshKind::Shishkin, 16, prob.spec.m == 2 ? 4.0 : 2.0, 1e-4);
      Field layer = field_sum(prob.decomposition.layers);
      OperatorOutput pw = hybrid_parts(Field::zero(1), layer, mesh, basis, prob.spec.m,
                                       prob.spec.k, prob.spec.lower_form, prob.spec.c);
      DiscreteFunction interp = prob.spec.m == 2 ? interpolate_hermite(layer, mesh)
                                                 : interpolate_gl(layer, mesh, basis);
      for (int cx = 0; cx < mesh.n(); ++cx) {
        const double mid = 0.5 * (mesh.grid.x[cx] + mesh.grid.x[cx + 1]);
        if (classify_cell(mesh, cx) == CellClass::Coarse)
          worst = std::max(worst, std::abs(pw.result.eval_on_cell(cx, 0, mid)));
        if (classify_cell(mesh, cx) == CellClass::Layer)
          worst = std::max(worst, std::abs(pw.result.eval_on_cell(cx, 0, mid) -
                                           interp.eval_on_cell(cx, 0, mid)));
      }
    }
    res.value = worst;
    res.pass = worst <= 1e-12;
    res.details = "zero layer branch on coarse cells; nodal interpolation on layer cells";
    out.push_back(res);
  }

  return out;
}

nlohmann::json checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::json j = nlohmann::json::array();
  for (const CheckResult& c : checks)
    j.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"details", c.details}});
  return j;
}

// ---------------------------------------------------------------
// Energy versus balanced comparison.
// ---------------------------------------------------------------

NormComparison compare_energy_vs_balanced(const std::string& problem_id, MeshKind kind,
                                          const std::vector<double>& epsilons, int n_fixed) {
  if (epsilons.size() < 2) fail(Errc::BadConfig, "the comparison needs at least two epsilons");
  Problem probe = problem_by_id(problem_id, epsilons.front());
  const int m = probe.spec.m;

  NormComparison cmp;
  cmp.problem = problem_id;
  cmp.mesh_kind = kind;
  cmp.degree = m == 2 ? 3 : 1;
  cmp.sigma = cmp.degree + 1;
  cmp.n_fixed = n_fixed;

  for (double eps : epsilons) {
    SingleRun run = run_single(problem_id, kind, cmp.sigma, cmp.degree, n_fixed, eps);
    cmp.rows.push_back({eps, run.row.total.energy, run.row.total.balanced});
  }

  auto minmax_eps = std::minmax_element(
      epsilons.begin(), epsilons.end());
  const size_t lo = minmax_eps.first - epsilons.begin();   // smallest eps
  const size_t hi = minmax_eps.second - epsilons.begin();  // largest eps

  {
    Verdict v;
    v.name = "balanced_tracks_layers";
    double worst_hi = 0.0, worst_lo = 1e300;
    for (const NormComparisonRow& r : cmp.rows) {
      worst_hi = std::max(worst_hi, r.balanced);
      worst_lo = std::min(worst_lo, r.balanced);
    }
    v.value = worst_lo > 0.0 ? worst_hi / worst_lo : 1e300;
    v.target = 1.0;
    v.tolerance = 0.25;
    v.pass = v.value <= 1.25;
    v.details = "balanced error stays flat across the epsilon sweep";
    cmp.verdicts.push_back(v);
  }
  {
    Verdict v;
    v.name = "energy_masks_layers";
    const double expected = std::sqrt(epsilons[lo] / epsilons[hi]);
    const double observed = cmp.rows[lo].energy / cmp.rows[hi].energy;
    v.value = observed / expected;
    v.target = 1.0;
    v.tolerance = 2.0;
    v.pass = v.value >= 1.0 / 3.0 && v.value <= 3.0;
    v.details = "energy error shrinks like sqrt(eps) while the layers persist";
    cmp.verdicts.push_back(v);
  }

  if (m == 2) {
    std::vector<int> sweep = {16, 32, 64, 128};
    std::vector<double> errs;
    for (int n : sweep)
      errs.push_back(run_single(problem_id, kind, cmp.sigma, cmp.degree, n, 1e-6)
                         .row.total.energy);
    RateScale scale = kind == MeshKind::BakhvalovS ? RateScale::n_inv()
                                                   : RateScale::n_inv_log_n();
    RateFit fit = rate_fit(sweep, errs, scale);
    Verdict v;
    v.name = "energy_rate";
    v.value = fit.slope;
    v.target = m;
    v.tolerance = 0.25;
    v.pass = fit.slope >= m - 0.25;
    v.details = "energy-norm rate of the fourth-order error at eps = 1e-6";
    cmp.verdicts.push_back(v);
  }
  return cmp;
}

nlohmann::json comparison_json(const NormComparison& cmp) {
  nlohmann::json j;
  j["problem"] = cmp.problem;
  j["mesh_kind"] = to_string(cmp.mesh_kind);
  j["degree"] = cmp.degree;
  j["sigma"] = cmp.sigma;
  j["n"] = cmp.n_fixed;
  j["rows"] = nlohmann::json::array();
  for (const NormComparisonRow& r : cmp.rows)
    j["rows"].push_back({{"epsilon", r.epsilon},
                         {"energy", r.energy},
                         {"balanced", r.balanced},
                         {"balanced_over_energy", r.balanced / r.energy}});
  j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : cmp.verdicts) j["verdicts"].push_back(verdict_json(v));
  bool all = true;
  for (const Verdict& v : cmp.verdicts) all = all && v.pass;
  j["all_pass"] = all;
  return j;
}

}  // namespace spfem
