#include <cmath>
#include <sstream>

#include "nlfem/solver.hpp"

namespace nlfem {

SymmetricFactorization::SymmetricFactorization(const Eigen::MatrixXd& a, bool allow_indefinite) {
  if (a.rows() != a.cols()) throw SolverError("factorization needs a square matrix");
  n_ = static_cast<int>(a.rows());
  llt_.compute(a);
  if (llt_.info() == Eigen::Success) {
    cholesky_ = true;
    return;
  }
  llt_ = Eigen::LLT<Eigen::MatrixXd>();
  if (!allow_indefinite) throw SolverError("Cholesky factorization failed (matrix not positive definite)");
  lu_.compute(a);
  singular_ = (lu_.matrixLU().diagonal().array() == 0.0).any();
}

Eigen::VectorXd SymmetricFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw SolverError("right-hand side size does not match the factorization");
  if (n_ == 0) return b;
  if (cholesky_) return llt_.solve(b);
  if (singular_) throw SolverError("matrix is exactly singular");
  return lu_.solve(b);
}

Solution expand(const Eigen::VectorXd& u, const IndexMap& dofs, const Mesh& mesh) {
  Solution sol;
  sol.mesh = &mesh;
  sol.values = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i = 0; i < dofs.size(); ++i) sol.values[dofs.row_to_node[i]] = u[i];
  return sol;
}

namespace {

Eigen::VectorXd conjugate_gradient(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SolveOptions& opts,
                                   SolveInfo& info) {
  const Eigen::VectorXd dinv = a.diagonal().cwiseInverse();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b, z = dinv.cwiseProduct(r), p = z;
  double rz = r.dot(z);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  for (int it = 1; it <= opts.cg_max_iterations; ++it) {
    const Eigen::VectorXd ap = a * p;
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rel = r.norm() / bnorm;
    info.residual_history.push_back(rel);
    info.iterations = it;
    if (rel <= opts.cg_tolerance) return x;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  std::ostringstream os;
  os << "conjugate gradients did not converge in " << opts.cg_max_iterations << " iterations; relative residuals:";
  const std::size_t n = info.residual_history.size();
  for (std::size_t k = n > 10 ? n - 10 : 0; k < n; ++k) os << ' ' << info.residual_history[k];
  throw SolverError(os.str());
}

}  // namespace

Eigen::VectorXd solve_dofs(const LinearSystem& system, SolveInfo* info_out, const SolveOptions& opts) {
  const Eigen::MatrixXd& a = system.A;
  const Eigen::VectorXd& b = system.b;
  if (a.rows() != b.size()) throw SolverError("system matrix and load vector sizes differ");
  if (!b.allFinite()) throw SolverError("load vector is not finite");
  SolveInfo info;
  Eigen::VectorXd u;
  if (system.size() <= opts.direct_limit) {
    SymmetricFactorization f(a);
    if (f.positive_definite()) {
      info.method = "cholesky";
    } else {
      info.method = "lu";
      info.warnings.push_back("Cholesky failed; matrix is not positive definite, solved by pivoted LU");
    }
    u = f.solve(b);
  } else {
    info.method = "cg";
    u = conjugate_gradient(a, b, opts, info);
  }
  const double anorm = a.cwiseAbs().rowwise().sum().maxCoeff();
  info.residual = (a * u - b).norm();
  info.residual_bound = 1e-10 * (anorm * u.norm() + b.norm());
  if (!(info.residual <= info.residual_bound)) {
    std::ostringstream os;
    os << "residual " << info.residual << " exceeds the bound " << info.residual_bound;
    info.warnings.push_back(os.str());
  }
  if (info_out) *info_out = info;
  return u;
}

Solution solve(const LinearSystem& system, const Mesh& mesh, const SolveOptions& opts) {
  SolveInfo info;
  Eigen::VectorXd u = solve_dofs(system, &info, opts);
  Solution sol = expand(u, system.dofs, mesh);
  sol.info = std::move(info);
  return sol;
}

LinearSystem shifted_system(const LinearSystem& system, const SparseMatrix& M, double omega2) {
  if (M.rows() != system.A.rows() || M.cols() != system.A.cols())
    throw std::invalid_argument("mass matrix does not match the system's DOF map");
  if (!(omega2 >= 0.0)) throw std::invalid_argument("shift omega^2 must be nonnegative");
  LinearSystem out = system;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it) out.A(it.row(), it.col()) -= omega2 * it.value();
  return out;
}

}  // namespace nlfem
