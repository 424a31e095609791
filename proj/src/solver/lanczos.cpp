#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "nlfem/solver.hpp"

namespace nlfem {

double lanczos_max_abs(int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                       const LanczosOptions& opts, int* iterations) {
  if (n == 0) return 0.0;
  std::mt19937_64 rng(20240611u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * dist(rng);
  v.normalize();

  const int m_max = std::min(n, opts.max_iterations);
  Eigen::MatrixXd basis(n, m_max);
  std::vector<double> alpha, beta;
  double estimate = 0.0;
  int steps = 0;
  for (int j = 0; j < m_max; ++j) {
    basis.col(j) = v;
    Eigen::VectorXd w = apply(v);
    alpha.push_back(v.dot(w));
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    const double b = w.norm();
    steps = j + 1;

    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), j + 1);
    Eigen::VectorXd e = j > 0 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), j)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const auto& th = es.eigenvalues();
    const int k = std::abs(th[0]) >= std::abs(th[j]) ? 0 : j;
    estimate = std::abs(th[k]);
    const double residual = b * std::abs(es.eigenvectors()(j, k));
    if (b <= 1e-14 * std::max(estimate, 1e-300) || residual <= opts.tolerance * estimate) break;
    beta.push_back(b);
    v = w / b;
  }
  if (iterations) *iterations = steps;
  return estimate;
}

ConditionEstimate condition_number(const Eigen::MatrixXd& a, const SymmetricFactorization& f,
                                   const LanczosOptions& opts) {
  ConditionEstimate out;
  const int n = static_cast<int>(a.rows());
  int it1 = 0, it2 = 0;
  out.lambda_max = lanczos_max_abs(n, [&](const Eigen::VectorXd& x) { Eigen::VectorXd y = a * x; return y; }, opts, &it1);
  if (f.singular()) {
    out.singular = true;
    out.lambda_min = 0.0;
    out.value = std::numeric_limits<double>::infinity();
    out.iterations = it1;
    return out;
  }
  const double inv = lanczos_max_abs(n, [&](const Eigen::VectorXd& x) { return f.solve(x); }, opts, &it2);
  out.lambda_min = inv > 0.0 ? 1.0 / inv : 0.0;
  out.value = inv > 0.0 ? out.lambda_max * inv : std::numeric_limits<double>::infinity();
  out.singular = !(inv > 0.0) || !std::isfinite(out.value);
  out.iterations = it1 + it2;
  return out;
}

ConditionEstimate condition_number(const Eigen::MatrixXd& a, const LanczosOptions& opts) {
  return condition_number(a, SymmetricFactorization(a), opts);
}

}  // namespace nlfem
