#pragma once

#include <array>
#include <vector>

namespace nlfem {

/// Rule on [0, 1]: sum_k w_k g(x_k) ~ integral of weight(x) g(x).
struct LineRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [0, 1].
const LineRule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight r^p (1 - r)^q, p, q > -1.
LineRule gauss_jacobi(int n, double p, double q);

/// Rule on the reference triangle with barycentric points; weights sum to 1,
/// so integral over T of g ~ |T| * sum_k w_k g(x_k).
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

constexpr int kMaxTriangleDegree = 20;

/// Exact for polynomials of total degree <= degree, degree in [1, 20].
const TriangleRule& triangle_rule(int degree);

}  // namespace nlfem
