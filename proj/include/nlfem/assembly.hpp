#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nlfem/mesh.hpp"
#include "nlfem/pair_quadrature.hpp"
#include "nlfem/tail.hpp"

namespace nlfem {

using ScalarField = std::function<double(Point)>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class EnergyKind { EI, EII };
const char* to_string(EnergyKind e);
EnergyKind energy_from_string(const std::string& name);

struct ProblemSpec {
  EnergyKind energy = EnergyKind::EII;
  double s = 0.5;
  /// Local diffusivity on Omega1; empty means 1.
  ScalarField sigma_l;
  KernelWeight sigma_nl = KernelWeight::constant(1.0);
  /// Source; empty means 1.
  ScalarField f;
  TailConfig tail;
  QuadratureConfig quad;
  GeometrySpec geometry;

  /// Range of s, positivity of the diffusivities and symmetry of sigma_nl,
  /// by sampling on the mesh. Throws std::invalid_argument.
  void validate(const Mesh& mesh) const;
};

/// Row/column index of each mesh node in an assembled matrix (-1 = dropped).
struct IndexMap {
  std::vector<int> node_to_row;
  std::vector<int> row_to_node;
  int size() const { return static_cast<int>(row_to_node.size()); }
};

/// Interior nodes of Omega (not on its boundary); the Dirichlet DOFs.
IndexMap interior_dofs(const Mesh& mesh);
/// All nodes of Omega triangles, in node order.
IndexMap domain_nodes(const Mesh& mesh);

/// P1 stiffness of sigma_l over OMEGA1 triangles (sigma_l at barycenters).
SparseMatrix assemble_local(const Mesh& mesh, const ScalarField& sigma_l, const IndexMap& map);
SparseMatrix assemble_local(const Mesh& mesh, const ScalarField& sigma_l = {});

/// P1 mass matrix over Omega.
SparseMatrix assemble_mass(const Mesh& mesh, const IndexMap& map);
SparseMatrix assemble_mass(const Mesh& mesh);

/// Load vector int f phi_i with a degree-6 element rule.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, const IndexMap& map);
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f);

struct AssemblyOptions {
  /// OpenMP workers; 0 uses the OpenMP default.
  int workers = 0;
  /// Upper bound on the per-worker dense accumulation buffers.
  double memory_budget_bytes = 2.0e9;
};

/// Censored form: pair integrals over OMEGA2 x OMEGA2.
Eigen::MatrixXd assemble_nonlocal_censored(const Mesh& mesh, double s, const KernelWeight& sigma,
                                           const QuadratureConfig& quad, const IndexMap& map,
                                           const AssemblyOptions& opts = {});
Eigen::MatrixXd assemble_nonlocal_censored(const Mesh& mesh, double s, const KernelWeight& sigma,
                                           const QuadratureConfig& quad = {});

/// Form over Q_{Omega2} for functions vanishing outside Omega: censored part,
/// twice the OMEGA2 x OMEGA1 and OMEGA2 x auxiliary pair integrals, and the
/// far-field mass term C(2,s) sigma_tail int_{Omega2} u v w_far.
Eigen::MatrixXd assemble_nonlocal_full(const Mesh& mesh, double s, const KernelWeight& sigma, const TailConfig& tail,
                                       const QuadratureConfig& quad, const IndexMap& map,
                                       const AssemblyOptions& opts = {});
Eigen::MatrixXd assemble_nonlocal_full(const Mesh& mesh, double s, const KernelWeight& sigma,
                                       const TailConfig& tail = {}, const QuadratureConfig& quad = {});

/// Serial references: every pair goes through pair_interaction, in
/// lexicographic pair order.
Eigen::MatrixXd assemble_nonlocal_censored_reference(const Mesh& mesh, double s, const KernelWeight& sigma,
                                                     const QuadratureConfig& quad, const IndexMap& map);
Eigen::MatrixXd assemble_nonlocal_full_reference(const Mesh& mesh, double s, const KernelWeight& sigma,
                                                 const TailConfig& tail, const QuadratureConfig& quad,
                                                 const IndexMap& map);

struct LinearSystem {
  /// Local plus nonlocal form on the interior DOFs (dense, symmetric).
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  IndexMap dofs;
  /// The local part of A, kept for splitting energies.
  SparseMatrix local;
  std::optional<SparseMatrix> M;
  EnergyKind energy = EnergyKind::EII;
  double s = 0.5;
  /// E_I with s <= 1/2: the continuous problem need not have a unique minimizer.
  bool ill_posed = false;
  std::vector<std::string> warnings;

  int size() const { return dofs.size(); }
  /// A minus its local part.
  Eigen::MatrixXd nonlocal() const;
};

struct BuildOptions {
  AssemblyOptions assembly;
  bool with_mass = false;
  bool reference = false;
};

LinearSystem build_system(const ProblemSpec& spec, const Mesh& mesh, const BuildOptions& opts = {});

/// Coordinate text format: "rows cols nnz" then "row col value" lines,
/// 0-based, 17 significant digits, exact zeros skipped.
void write_coo(std::ostream& os, const Eigen::MatrixXd& a);
void write_coo(std::ostream& os, const SparseMatrix& a);
void write_coo(const std::string& path, const Eigen::MatrixXd& a);
Eigen::MatrixXd read_coo(std::istream& is);

/// Dense little-endian float64, row-major, after a header of two
/// little-endian uint32 (rows, cols).
void write_dense_binary(std::ostream& os, const Eigen::MatrixXd& a);
void write_dense_binary(const std::string& path, const Eigen::MatrixXd& a);
Eigen::MatrixXd read_dense_binary(std::istream& is);
Eigen::MatrixXd read_dense_binary(const std::string& path);

}  // namespace nlfem
