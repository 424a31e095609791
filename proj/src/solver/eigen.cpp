// Shift-invert Lanczos for A v = lambda M v.
//
// The operator Op = (A - shift M)^{-1} M is self-adjoint in the M inner
// product; its largest eigenvalues theta give lambda = shift + 1/theta.
// Thick restart: after each sweep the best Ritz vectors are kept, the
// projected matrix becomes diag(theta) bordered by the residual couplings,
// and the expansion resumes from the normalized residual.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nlfem/solver.hpp"

namespace nlfem {

namespace {

EigenResult dense_eigs(const Eigen::MatrixXd& a, const SparseMatrix& m, int k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::MatrixXd(m));
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  EigenResult out;
  out.vectors = es.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    out.values.push_back(es.eigenvalues()[i]);
    const Eigen::VectorXd x = out.vectors.col(i);
    const Eigen::VectorXd ax = a * x;
    out.residuals.push_back((ax - out.values.back() * (m * x)).norm() / std::max(ax.norm(), 1e-300));
  }
  return out;
}

}  // namespace

EigenResult generalized_eigs(const Eigen::MatrixXd& a, const SparseMatrix& m, int k, const EigenOptions& opts) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || m.rows() != n || m.cols() != n) throw std::invalid_argument("A and M sizes differ");
  if (k < 1 || k > n) throw std::invalid_argument("eigenvalue count must lie in [1, n]");
  const int dim = std::min(n, opts.subspace > 0 ? opts.subspace : 2 * k + 10);
  if (dim >= n || dim < k + 2) return dense_eigs(a, m, k);

  Eigen::MatrixXd shifted = a;
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) shifted(it.row(), it.col()) -= opts.shift * it.value();
  const SymmetricFactorization factor(shifted);
  if (factor.singular()) throw SolverError("shifted matrix A - shift M is singular; choose another shift");
  auto op = [&](const Eigen::VectorXd& x) { return factor.solve(m * x); };
  auto mnorm = [&](const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(m * x))); };

  Eigen::MatrixXd V(n, dim), MV(n, dim);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * dist(rng);
  v /= mnorm(v);

  EigenResult out;
  int kept = 0;
  for (int restart = 0;; ++restart) {
    int used = dim;
    double beta = 0.0;
    Eigen::VectorXd w;
    for (int j = kept; j < dim; ++j) {
      V.col(j) = v;
      MV.col(j) = m * v;
      w = op(v);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd h = MV.leftCols(j + 1).transpose() * w;
        w -= V.leftCols(j + 1) * h;
        if (pass == 0) {
          H.block(0, j, j + 1, 1) = h;
          H.block(j, 0, 1, j + 1) = h.transpose();
        } else {
          H.block(0, j, j + 1, 1) += h;
          H.block(j, 0, 1, j + 1) += h.transpose();
        }
      }
      beta = mnorm(w);
      if (beta <= 1e-14 * H.topLeftCorner(j + 1, j + 1).norm()) {
        used = j + 1;
        beta = 0.0;
        break;
      }
      if (j + 1 < dim) {
        H(j + 1, j) = H(j, j + 1) = beta;
        v = w / beta;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(used, used));
    // Descending theta.
    std::vector<int> order(used);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return es.eigenvalues()[x] > es.eigenvalues()[y]; });
    const int want = std::min(k, used);

    out.values.assign(want, 0.0);
    out.residuals.assign(want, 0.0);
    out.vectors.resize(n, want);
    bool converged = want == k;
    for (int i = 0; i < want; ++i) {
      const double theta = es.eigenvalues()[order[i]];
      const Eigen::VectorXd x = V.leftCols(used) * es.eigenvectors().col(order[i]);
      const double lambda = opts.shift + 1.0 / theta;
      const Eigen::VectorXd ax = a * x;
      const double res = (ax - lambda * (m * x)).norm() / std::max(ax.norm(), 1e-300);
      out.values[i] = lambda;
      out.residuals[i] = res;
      out.vectors.col(i) = x;
      converged = converged && res <= opts.tolerance;
    }
    out.restarts = restart;
    if (converged) break;
    if (restart >= opts.max_restarts || beta == 0.0) {
      std::ostringstream os;
      os << "shift-invert Lanczos did not converge after " << restart << " restarts; relative residuals:";
      for (double r : out.residuals) os << ' ' << r;
      throw SolverError(os.str());
    }
    kept = std::min(dim - 2, k + (dim - k) / 2);
    Eigen::MatrixXd keep(n, kept);
    H.setZero();
    for (int i = 0; i < kept; ++i) {
      keep.col(i) = V.leftCols(used) * es.eigenvectors().col(order[i]);
      H(i, i) = es.eigenvalues()[order[i]];
    }
    V.leftCols(kept) = keep;
    for (int i = 0; i < kept; ++i) MV.col(i) = m * V.col(i);
    v = w / beta;
  }
  // Ascending lambda.
  std::vector<int> idx(out.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return out.values[x] < out.values[y]; });
  EigenResult sorted = out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sorted.values[i] = out.values[idx[i]];
    sorted.residuals[i] = out.residuals[idx[i]];
    sorted.vectors.col(i) = out.vectors.col(idx[i]);
  }
  return sorted;
}

}  // namespace nlfem
