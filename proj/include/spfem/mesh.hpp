#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace spfem {

// Tensor-product grid on the unit interval or unit square.
struct Grid {
  int dim = 1;
  Eigen::VectorXd x;  // nodes, strictly ascending
  Eigen::VectorXd y;  // second direction, used when dim == 2

  int cells_x() const { return static_cast<int>(x.size()) - 1; }
  int cells_y() const { return dim == 2 ? static_cast<int>(y.size()) - 1 : 0; }
  int cell_count() const { return dim == 2 ? cells_x() * cells_y() : cells_x(); }

  // Index of the cell containing p (clamped to the outermost cells).
  int find_cell(const Eigen::VectorXd& nodes, double p) const;
};

enum class MeshKind { Shishkin, BakhvalovS, Custom };

std::string to_string(MeshKind kind);
MeshKind mesh_kind_from_string(const std::string& name);

// Mesh-generating function phi on [0, 1/2] with phi(0) = 0 and
// phi(1/2) = ln N.  The fine nodes are sigma * eps * phi(2i/N).
struct MeshGeneratingFunction {
  MeshKind kind = MeshKind::Shishkin;
  int n_cells = 0;  // the N this function was built for
  bool convex = false;
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;

  static MeshGeneratingFunction shishkin(int n);
  static MeshGeneratingFunction bakhvalov_s(int n);
  static MeshGeneratingFunction custom(int n, std::function<double(double)> phi,
                                       std::function<double(double)> phi_prime,
                                       bool convex = false);
};

// sup over [0, 1/2] of |d/dt exp(-phi(t))|.  Closed form for the
// built-in kinds, dense sampling with local refinement otherwise.
double max_psi_prime(const MeshGeneratingFunction& gen, int n);

struct TransitionParams {
  double epsilon = 0.0;
  double sigma = 0.0;
  int n_cells = 0;
  double lambda = 0.0;  // sigma * epsilon * ln N
};

// Validates eps in (0, 1/4], sigma > 0, N divisible by 4 and lambda <= 1/4.
TransitionParams make_transition(double epsilon, double sigma, int n);

// Layer cells resolve the boundary layers, Coarse cells lie inside
// (lambda, 1 - lambda)^dim, Ply cells form the single-cell rim in
// between.  Ordered so that a 2D class is the minimum over directions.
enum class CellClass { Layer = 0, Ply = 1, Coarse = 2 };

std::string to_string(CellClass c);

struct STypeMesh {
  int dim = 1;
  Grid grid;
  MeshGeneratingFunction gen;
  TransitionParams params;
  double h = 0.0;  // width of the layer cell meeting the transition point
  std::vector<CellClass> axis_class;  // per 1D cell along each direction

  int n() const { return params.n_cells; }
  double lambda() const { return params.lambda; }
};

STypeMesh build_mesh(const MeshGeneratingFunction& gen, const TransitionParams& params,
                     int dim = 1);

CellClass classify_cell(const STypeMesh& mesh, int i);
CellClass classify_cell(const STypeMesh& mesh, int i, int j);

// Plain-text nodes, one coordinate per line, 17 significant digits.
void write_nodes_text(const STypeMesh& mesh, std::ostream& out);

// Descriptor with kind, N, sigma, epsilon, lambda, h and the node list.
nlohmann::json mesh_descriptor(const STypeMesh& mesh);

}  // namespace spfem
