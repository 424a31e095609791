#include <array>
#include <mutex>
#include <stdexcept>
#include <string>

#include "nlfem/quadrature.hpp"

namespace nlfem {

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.bary.push_back({b, a, a});
  r.bary.push_back({a, b, a});
  r.bary.push_back({a, a, b});
  for (int k = 0; k < 3; ++k) r.w.push_back(w);
}

// Collapsed (conical product) rule: Gauss-Legendre in one direction and
// Gauss-Jacobi with weight (1 - b) in the other; exact to degree 2n - 1.
TriangleRule conical(int degree) {
  const int n = (degree + 2) / 2;
  const LineRule& gl = gauss_legendre(n);
  const LineRule gj = gauss_jacobi(n, 0.0, 1.0);
  TriangleRule r;
  r.degree = degree;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double b = gj.x[j];
      const double xi = gl.x[i] * (1.0 - b);
      const double eta = b;
      r.bary.push_back({1.0 - xi - eta, xi, eta});
      r.w.push_back(2.0 * gl.w[i] * gj.w[j]);
    }
  return r;
}

TriangleRule make_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.w.push_back(1.0);
      return r;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      return r;
    case 3:
    case 4:
      add_orbit3(r, 0.445948490915965, 0.223381589678011);
      add_orbit3(r, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.w.push_back(0.225);
      add_orbit3(r, 0.470142064105115, 0.132394152788506);
      add_orbit3(r, 0.101286507323456, 0.125939180544827);
      break;
    default:
      return conical(degree);
  }
  // The tabulated rules carry 15 digits; rescale so the weights sum to 1 exactly.
  double s = 0.0;
  for (double w : r.w) s += w;
  for (double& w : r.w) w /= s;
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  if (degree < 1 || degree > kMaxTriangleDegree)
    throw std::invalid_argument("triangle rule degree " + std::to_string(degree) + " unsupported; supported range is [1, " +
                                std::to_string(kMaxTriangleDegree) + "]");
  static std::once_flag once;
  static std::array<TriangleRule, kMaxTriangleDegree + 1> rules;
  std::call_once(once, [] {
    for (int d = 1; d <= kMaxTriangleDegree; ++d) rules[d] = make_rule(d);
  });
  return rules[degree];
}

}  // namespace nlfem
