#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "nlfem/quadrature.hpp"

namespace nlfem {

LineRule gauss_jacobi(int n, double p, double q) {
  if (n < 1) throw std::invalid_argument("Gauss-Jacobi rule needs at least one point");
  if (!(p > -1.0) || !(q > -1.0)) throw std::invalid_argument("Gauss-Jacobi exponents must exceed -1");
  // Golub-Welsch on [-1, 1] for (1 - x)^alpha (1 + x)^beta, with r = (1 + x) / 2.
  const double alpha = q, beta = p, ab = alpha + beta;
  Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 0);
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    diag(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    double b;
    if (k == 1)
      b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      b = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    off(k - 1) = std::sqrt(b);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(ab + 2.0));
  LineRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  if (n == 1) {
    rule.x[0] = 0.5 * (1.0 + diag(0));
    rule.w[0] = mu0 * std::pow(2.0, -(ab + 1.0));
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const double scale = std::pow(2.0, -(ab + 1.0));
  for (int k = 0; k < n; ++k) {
    rule.x[k] = 0.5 * (1.0 + es.eigenvalues()(k));
    const double v0 = es.eigenvectors()(0, k);
    rule.w[k] = mu0 * v0 * v0 * scale;
  }
  return rule;
}

namespace {

// Newton-polished Gauss-Legendre on [-1, 1], mapped to [0, 1].
void legendre(int n, double x, double& pn, double& dpn) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

LineRule make_legendre(int n) {
  LineRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, pn, dpn);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, pn, dpn);
    rule.x[n - 1 - i] = 0.5 * (1.0 + x);
    rule.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dpn * dpn);
  }
  return rule;
}

}  // namespace

const LineRule& gauss_legendre(int n) {
  if (n < 1 || n > 200) throw std::invalid_argument("Gauss-Legendre order must lie in [1, 200], got " + std::to_string(n));
  static std::mutex mutex;
  static std::map<int, LineRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_legendre(n)).first;
  return it->second;
}

}  // namespace nlfem
