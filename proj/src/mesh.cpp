#include "spfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "spfem/error.hpp"

namespace spfem {

int Grid::find_cell(const Eigen::VectorXd& nodes, double p) const {
  const int cells = static_cast<int>(nodes.size()) - 1;
  auto it = std::upper_bound(nodes.data(), nodes.data() + nodes.size(), p);
  int c = static_cast<int>(it - nodes.data()) - 1;
  return std::clamp(c, 0, cells - 1);
}

std::string to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::Shishkin: return "shishkin";
    case MeshKind::BakhvalovS: return "bakhvalov-s";
    case MeshKind::Custom: return "custom";
  }
  return "unknown";
}

MeshKind mesh_kind_from_string(const std::string& name) {
  if (name == "shishkin") return MeshKind::Shishkin;
  if (name == "bakhvalov-s" || name == "bakhvalov_s") return MeshKind::BakhvalovS;
  if (name == "custom") return MeshKind::Custom;
  fail(Errc::BadConfig, "unknown mesh kind '" + name + "'");
}

std::string to_string(CellClass c) {
  switch (c) {
    case CellClass::Layer: return "layer";
    case CellClass::Ply: return "ply";
    case CellClass::Coarse: return "coarse";
  }
  return "unknown";
}

namespace {

void check_cell_count(int n) {
  if (n < 4 || n % 4 != 0) fail(Errc::BadCellCount, "N must be a positive multiple of 4");
}

void check_endpoints(const MeshGeneratingFunction& gen) {
  const double ln_n = std::log(static_cast<double>(gen.n_cells));
  if (std::abs(gen.phi(0.0)) > 1e-12 * std::max(1.0, ln_n))
    fail(Errc::BadGeneratingFunction, "phi(0) must vanish");
  if (std::abs(gen.phi(0.5) - ln_n) > 1e-12 * ln_n)
    fail(Errc::BadGeneratingFunction, "phi(1/2) must equal ln N");
}

// sup of |phi'| exp(-phi) by sampling plus ternary refinement around
// the best bracket.
double sampled_max_psi_prime(const MeshGeneratingFunction& gen) {
  const int samples = 10000;
  auto g = [&gen](double t) { return std::abs(gen.phi_prime(t)) * std::exp(-gen.phi(t)); };

  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i <= samples; ++i) {
    double t = 0.5 * i / samples;
    double v = g(t);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = 0.5 * std::max(0, best_i - 1) / samples;
  double hi = 0.5 * std::min(samples, best_i + 1) / samples;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (g(m1) < g(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, g(0.5 * (lo + hi)));
}

}  // namespace

MeshGeneratingFunction MeshGeneratingFunction::shishkin(int n) {
  check_cell_count(n);
  MeshGeneratingFunction gen;
  gen.kind = MeshKind::Shishkin;
  gen.n_cells = n;
  gen.convex = true;
  const double ln_n = std::log(static_cast<double>(n));
  gen.phi = [ln_n](double t) { return 2.0 * t * ln_n; };
  gen.phi_prime = [ln_n](double) { return 2.0 * ln_n; };
  return gen;
}

MeshGeneratingFunction MeshGeneratingFunction::bakhvalov_s(int n) {
  check_cell_count(n);
  MeshGeneratingFunction gen;
  gen.kind = MeshKind::BakhvalovS;
  gen.n_cells = n;
  gen.convex = true;
  const double a = 2.0 * (1.0 - 1.0 / n);
  gen.phi = [a](double t) { return -std::log(1.0 - a * t); };
  gen.phi_prime = [a](double t) { return a / (1.0 - a * t); };
  return gen;
}

MeshGeneratingFunction MeshGeneratingFunction::custom(int n, std::function<double(double)> phi,
                                                      std::function<double(double)> phi_prime,
                                                      bool convex) {
  check_cell_count(n);
  if (!phi || !phi_prime) fail(Errc::BadGeneratingFunction, "phi and phi_prime required");
  MeshGeneratingFunction gen;
  gen.kind = MeshKind::Custom;
  gen.n_cells = n;
  gen.convex = convex;
  gen.phi = std::move(phi);
  gen.phi_prime = std::move(phi_prime);
  check_endpoints(gen);
  return gen;
}

double max_psi_prime(const MeshGeneratingFunction& gen, int n) {
  if (gen.n_cells != n)
    fail(Errc::BadGeneratingFunction, "generating function was built for a different N");
  switch (gen.kind) {
    case MeshKind::Shishkin:
      return 2.0 * std::log(static_cast<double>(n));
    case MeshKind::BakhvalovS:
      return 2.0 * (1.0 - 1.0 / n);
    case MeshKind::Custom:
      return sampled_max_psi_prime(gen);
  }
  fail(Errc::BadGeneratingFunction, "unknown mesh kind");
}

TransitionParams make_transition(double epsilon, double sigma, int n) {
  check_cell_count(n);
  if (!(epsilon > 0.0) || epsilon > 0.25)
    fail(Errc::BadEpsilon, "epsilon must lie in (0, 1/4]");
  if (!(sigma > 0.0)) fail(Errc::BadConfig, "sigma must be positive");

  TransitionParams params;
  params.epsilon = epsilon;
  params.sigma = sigma;
  params.n_cells = n;
  params.lambda = sigma * epsilon * std::log(static_cast<double>(n));
  if (params.lambda > 0.25 * (1.0 + 1e-12))
    fail(Errc::TransitionTooLarge,
         "transition point sigma*eps*ln(N) exceeds 1/4; the mesh would not be layer-adapted");
  return params;
}

STypeMesh build_mesh(const MeshGeneratingFunction& gen, const TransitionParams& params,
                     int dim) {
  if (dim != 1 && dim != 2) fail(Errc::UnsupportedOrder, "dim must be 1 or 2");
  if (gen.n_cells != params.n_cells)
    fail(Errc::BadGeneratingFunction, "generating function and transition params disagree on N");
  check_endpoints(gen);

  const int n = params.n_cells;

  // phi must be nondecreasing; a convex flag additionally promises
  // nondecreasing increments.
  {
    const int samples = 1000;
    const double ln_n = std::log(static_cast<double>(n));
    double prev = gen.phi(0.0);
    double prev_inc = 0.0;
    for (int i = 1; i <= samples; ++i) {
      double cur = gen.phi(0.5 * i / samples);
      double inc = cur - prev;
      if (inc < -1e-13 * std::max(1.0, ln_n))
        fail(Errc::NonMonotonePhi, "phi must be nondecreasing on [0, 1/2]");
      if (gen.convex && i > 1 && inc < prev_inc - 1e-10)
        fail(Errc::BadGeneratingFunction, "phi marked convex but increments decrease");
      prev = cur;
      prev_inc = inc;
    }
  }

  STypeMesh mesh;
  mesh.dim = dim;
  mesh.gen = gen;
  mesh.params = params;

  const double se = params.sigma * params.epsilon;
  Eigen::VectorXd x(n + 1);
  for (int i = 0; i <= n / 4; ++i) x[i] = se * gen.phi(2.0 * i / n);
  for (int i = n / 4 + 1; i < 3 * n / 4; ++i)
    x[i] = params.lambda + (4.0 * i / n - 1.0) * (0.5 - params.lambda);
  for (int i = 3 * n / 4; i <= n; ++i) x[i] = 1.0 - se * gen.phi(2.0 - 2.0 * i / n);

  for (int i = 0; i < n; ++i)
    if (!(x[i + 1] > x[i])) fail(Errc::NonMonotonePhi, "mesh nodes must be strictly increasing");

  mesh.h = x[n / 4] - x[n / 4 - 1];

  mesh.axis_class.resize(n);
  for (int i = 0; i < n; ++i) {
    if (i >= n / 4 && i < 3 * n / 4)
      mesh.axis_class[i] = CellClass::Coarse;
    else if (i == n / 4 - 1 || i == 3 * n / 4)
      mesh.axis_class[i] = CellClass::Ply;
    else
      mesh.axis_class[i] = CellClass::Layer;
  }

  mesh.grid.dim = dim;
  mesh.grid.x = x;
  if (dim == 2) mesh.grid.y = x;
  return mesh;
}

CellClass classify_cell(const STypeMesh& mesh, int i) {
  if (i < 0 || i >= mesh.n()) fail(Errc::IndexOutOfRange, "cell index");
  return mesh.axis_class[i];
}

CellClass classify_cell(const STypeMesh& mesh, int i, int j) {
  if (mesh.dim != 2) fail(Errc::RegionMeshMismatch, "two indices need a 2D mesh");
  if (i < 0 || i >= mesh.n() || j < 0 || j >= mesh.n())
    fail(Errc::IndexOutOfRange, "cell index");
  return std::min(mesh.axis_class[i], mesh.axis_class[j]);
}

void write_nodes_text(const STypeMesh& mesh, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < mesh.grid.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", mesh.grid.x[i]);
    out << buf << '\n';
  }
}

nlohmann::json mesh_descriptor(const STypeMesh& mesh) {
  nlohmann::json j;
  j["kind"] = to_string(mesh.gen.kind);
  j["N"] = mesh.n();
  j["sigma"] = mesh.params.sigma;
  j["epsilon"] = mesh.params.epsilon;
  j["lambda"] = mesh.lambda();
  j["h"] = mesh.h;
  j["dim"] = mesh.dim;
  j["nodes"] = std::vector<double>(mesh.grid.x.data(), mesh.grid.x.data() + mesh.grid.x.size());
  return j;
}

}  // namespace spfem
