#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfem/constants.hpp"
#include "nlfem/postprocess.hpp"
#include "nlfem/quadrature.hpp"

namespace nlfem {

namespace {

// int over the sub-triangle of sigma(x,y) (ux - u_h(y)) |x-y|^{-2-2s}, u_h
// given by the parent's barycentric interpolation.
double flux_rec(Point x, double ux, const std::array<Point, 3>& parent, const std::array<double, 3>& uv,
                const std::array<Point, 3>& p, double s, const KernelWeight& sigma, int depth) {
  const double diam = std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
  const double d = std::min({segment_distance(x, p[0], p[1]), segment_distance(x, p[1], p[2]),
                             segment_distance(x, p[2], p[0])});
  if (d < 2.0 * diam && depth < 30) {
    const Point m01 = 0.5 * (p[0] + p[1]), m12 = 0.5 * (p[1] + p[2]), m20 = 0.5 * (p[2] + p[0]);
    return flux_rec(x, ux, parent, uv, {p[0], m01, m20}, s, sigma, depth + 1) +
           flux_rec(x, ux, parent, uv, {m01, p[1], m12}, s, sigma, depth + 1) +
           flux_rec(x, ux, parent, uv, {m20, m12, p[2]}, s, sigma, depth + 1) +
           flux_rec(x, ux, parent, uv, {m01, m12, m20}, s, sigma, depth + 1);
  }
  const TriangleRule& rule = triangle_rule(6);
  const double det = cross(parent[1] - parent[0], parent[2] - parent[0]);
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& l = rule.bary[q];
    const Point y = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    const double b1 = cross(y - parent[0], parent[2] - parent[0]) / det;
    const double b2 = cross(parent[1] - parent[0], y - parent[0]) / det;
    const double uy = (1.0 - b1 - b2) * uv[0] + b1 * uv[1] + b2 * uv[2];
    const Point r = x - y;
    sum += rule.w[q] * sigma(x, y) * (ux - uy) * std::pow(dot(r, r), -1.0 - s);
  }
  return sum * 0.5 * std::abs(cross(p[1] - p[0], p[2] - p[0]));
}

}  // namespace

double nonlocal_flux(const Solution& sol, Point x, double s, const KernelWeight& sigma) {
  if (!sol.mesh) throw EvaluationError("solution is not attached to a mesh");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order s must lie in (0, 1)");
  const Mesh& mesh = *sol.mesh;
  const PointLocator loc(mesh);
  const auto hit = loc.locate(x);
  std::ostringstream where;
  where.precision(17);
  where << "(" << x.x << ", " << x.y << ")";
  if (hit.triangle < 0 || mesh.tags[hit.triangle] != Subdomain::Omega1)
    throw EvaluationError("flux point " + where.str() + " is not in Omega1");
  const double h = mesh.diameter(hit.triangle);
  double dist = 1e300;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] != Subdomain::Omega2) continue;
    const auto c = mesh.corners(t);
    dist = std::min({dist, segment_distance(x, c[0], c[1]), segment_distance(x, c[1], c[2]),
                     segment_distance(x, c[2], c[0])});
  }
  if (dist < h)
    throw EvaluationError("flux point " + where.str() + " is within one element size of Omega2");
  const Triangle& tx = mesh.triangles[hit.triangle];
  double ux = 0.0;
  for (int i = 0; i < 3; ++i) ux += hit.bary[i] * sol.values[tx[i]];
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] != Subdomain::Omega2) continue;
    const auto c = mesh.corners(t);
    const Triangle& tr = mesh.triangles[t];
    sum += flux_rec(x, ux, c, {sol.values[tr[0]], sol.values[tr[1]], sol.values[tr[2]]}, c, s, sigma, 0);
  }
  return cns(2, s) * sum;
}

}  // namespace nlfem
