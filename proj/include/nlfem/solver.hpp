#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlfem/assembly.hpp"

namespace nlfem {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense factorization of a symmetric matrix: Cholesky when it succeeds,
/// otherwise LU with partial pivoting.
class SymmetricFactorization {
 public:
  SymmetricFactorization() = default;
  /// With allow_indefinite = false a failed Cholesky throws SolverError.
  explicit SymmetricFactorization(const Eigen::MatrixXd& a, bool allow_indefinite = true);

  bool positive_definite() const { return cholesky_; }
  /// True when the LU factor has an exactly zero pivot.
  bool singular() const { return singular_; }
  int size() const { return n_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  int n_ = 0;
  bool cholesky_ = false;
  bool singular_ = false;
};

struct SolveOptions {
  /// Dense factorization up to this many DOFs, Jacobi-preconditioned CG beyond.
  int direct_limit = 20000;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 100000;
};

struct SolveInfo {
  std::string method;  // "cholesky", "lu" or "cg"
  int iterations = 0;
  double residual = 0.0;  // ||A u - b||
  double residual_bound = 0.0;  // 1e-10 (||A|| ||u|| + ||b||)
  std::vector<double> residual_history;
  std::vector<std::string> warnings;
};

/// Per-node coefficients of a P1 function (zero on the boundary and on
/// auxiliary nodes). Keeps a pointer to the mesh, which must outlive it.
struct Solution {
  Eigen::VectorXd values;
  const Mesh* mesh = nullptr;
  SolveInfo info;
};

/// Expands a DOF vector to per-node values.
Solution expand(const Eigen::VectorXd& u, const IndexMap& dofs, const Mesh& mesh);

/// Solution vector on the DOFs of the system.
Eigen::VectorXd solve_dofs(const LinearSystem& system, SolveInfo* info = nullptr, const SolveOptions& opts = {});
Solution solve(const LinearSystem& system, const Mesh& mesh, const SolveOptions& opts = {});

/// A - omega2 M on the same DOFs (the local part is carried along unchanged).
LinearSystem shifted_system(const LinearSystem& system, const SparseMatrix& M, double omega2);

struct ConditionEstimate {
  double value = 0.0;  // |lambda|_max / |lambda|_min, +inf when singular
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool singular = false;
  int iterations = 0;
};

struct LanczosOptions {
  int max_iterations = 300;
  /// Stop once the extreme Ritz pair has residual below tolerance * |theta|.
  double tolerance = 1e-4;
};

/// Largest |eigenvalue| of a symmetric operator given by its action, by
/// Lanczos with full reorthogonalization from a fixed start vector.
double lanczos_max_abs(int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                       const LanczosOptions& opts = {}, int* iterations = nullptr);

ConditionEstimate condition_number(const Eigen::MatrixXd& a, const LanczosOptions& opts = {});
/// Same, reusing a factorization of a.
ConditionEstimate condition_number(const Eigen::MatrixXd& a, const SymmetricFactorization& f,
                                   const LanczosOptions& opts = {});

struct EigenOptions {
  double shift = 0.0;
  int max_restarts = 3;
  double tolerance = 1e-8;
  /// Subspace size; 0 selects 2k + 10.
  int subspace = 0;
};

struct EigenResult {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;  // ||A v - lambda M v|| / ||A v||
  int restarts = 0;
};

/// k smallest eigenvalues of A v = lambda M v (A symmetric, M SPD) by
/// shift-invert Lanczos in the M inner product with thick restarts.
EigenResult generalized_eigs(const Eigen::MatrixXd& a, const SparseMatrix& m, int k, const EigenOptions& opts = {});

}  // namespace nlfem
