#include <cmath>

#include "nlfem/postprocess.hpp"
#include "nlfem/quadrature.hpp"

namespace nlfem {

double l2_error(const Solution& sol, const ScalarField& ref) {
  if (!sol.mesh) throw EvaluationError("solution is not attached to a mesh");
  const Mesh& mesh = *sol.mesh;
  const TriangleRule& rule = triangle_rule(8);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const auto c = mesh.corners(t);
    const Triangle& tr = mesh.triangles[t];
    double e = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.bary[q];
      const double uh = l[0] * sol.values[tr[0]] + l[1] * sol.values[tr[1]] + l[2] * sol.values[tr[2]];
      const double d = uh - ref(l[0] * c[0] + l[1] * c[1] + l[2] * c[2]);
      e += rule.w[q] * d * d;
    }
    sum += mesh.area(t) * e;
  }
  return std::sqrt(sum);
}

double h1_seminorm_error_omega1(const Solution& sol, const std::function<Point(Point)>& ref_grad) {
  if (!sol.mesh) throw EvaluationError("solution is not attached to a mesh");
  const Mesh& mesh = *sol.mesh;
  const TriangleRule& rule = triangle_rule(8);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] != Subdomain::Omega1) continue;
    const auto c = mesh.corners(t);
    const double det = cross(c[1] - c[0], c[2] - c[0]);
    Point g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const Point e = c[(i + 2) % 3] - c[(i + 1) % 3];
      g = g + (sol.values[mesh.triangles[t][i]] / det) * Point{-e.y, e.x};
    }
    double e = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.bary[q];
      const Point d = g - ref_grad(l[0] * c[0] + l[1] * c[1] + l[2] * c[2]);
      e += rule.w[q] * dot(d, d);
    }
    sum += mesh.area(t) * e;
  }
  return std::sqrt(sum);
}

double vs_seminorm(const Solution& sol, const LinearSystem& system) {
  Eigen::VectorXd u(system.size());
  for (int i = 0; i < system.size(); ++i) u[i] = sol.values[system.dofs.row_to_node[i]];
  double q = u.dot(system.A * u);
  for (int k = 0; k < system.local.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(system.local, k); it; ++it) q -= u[it.row()] * it.value() * u[it.col()];
  return std::sqrt(std::max(0.0, q));
}

}  // namespace nlfem
