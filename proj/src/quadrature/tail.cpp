#include "nlfem/tail.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nlfem/quadrature.hpp"

namespace nlfem {

namespace {

std::string point_string(Point x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x.x << ", " << x.y << ")";
  return os.str();
}

double point_triangle_distance(Point x, const std::array<Point, 3>& p) {
  const double c0 = cross(p[1] - p[0], x - p[0]);
  const double c1 = cross(p[2] - p[1], x - p[1]);
  const double c2 = cross(p[0] - p[2], x - p[2]);
  if ((c0 >= 0 && c1 >= 0 && c2 >= 0) || (c0 <= 0 && c1 <= 0 && c2 <= 0)) return 0.0;
  return std::min({segment_distance(x, p[0], p[1]), segment_distance(x, p[1], p[2]), segment_distance(x, p[2], p[0])});
}

double aux_rec(Point x, const std::array<Point, 3>& p, double s, const KernelWeight& sigma, const TailConfig& cfg,
               int depth) {
  const double diam = std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
  const double d = point_triangle_distance(x, p);
  if (d <= 0.0) throw QuadratureError("tail point " + point_string(x) + " lies in the auxiliary layer");
  if (d < cfg.aux_split_distance * diam && depth < cfg.aux_max_depth) {
    const Point m01 = 0.5 * (p[0] + p[1]), m12 = 0.5 * (p[1] + p[2]), m20 = 0.5 * (p[2] + p[0]);
    return aux_rec(x, {p[0], m01, m20}, s, sigma, cfg, depth + 1) + aux_rec(x, {m01, p[1], m12}, s, sigma, cfg, depth + 1) +
           aux_rec(x, {m20, m12, p[2]}, s, sigma, cfg, depth + 1) + aux_rec(x, {m01, m12, m20}, s, sigma, cfg, depth + 1);
  }
  const TriangleRule& rule = triangle_rule(cfg.aux_degree);
  const double area = 0.5 * std::abs(cross(p[1] - p[0], p[2] - p[0]));
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& b = rule.bary[q];
    const Point y = b[0] * p[0] + b[1] * p[1] + b[2] * p[2];
    const Point r = x - y;
    sum += rule.w[q] * sigma(x, y) * std::pow(dot(r, r), -1.0 - s);
  }
  return sum * area;
}

}  // namespace

OuterBoundary outer_boundary(const Mesh& mesh) {
  std::map<Edge, std::pair<int, std::array<int, 2>>> count;
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      auto& e = count[make_edge(a, b)];
      ++e.first;
      e.second = {a, b};
    }
  OuterBoundary out;
  for (const auto& [edge, info] : count)
    if (info.first == 1) {
      out.a.push_back(mesh.nodes[info.second[0]]);
      out.b.push_back(mesh.nodes[info.second[1]]);
    }
  return out;
}

double far_field_polygon(Point x, const OuterBoundary& outer, double s, int angular_order) {
  if (angular_order < 1) throw std::invalid_argument("angular quadrature order must be positive");
  // Divergence theorem with G = (y-x)|y-x|^{-2-2s}, div G = -2s |y-x|^{-2-2s}:
  // each edge contributes sign(d) |d|^{-2s} / (2s) * integral of cos^{2s}
  // over the angle it subtends, d being the signed distance of its line.
  double total = 0.0;
  for (std::size_t e = 0; e < outer.a.size(); ++e) {
    const Point a = outer.a[e], b = outer.b[e];
    const double len = distance(a, b);
    const Point u = (1.0 / len) * (b - a);
    const Point n{u.y, -u.x};
    const double d = dot(a - x, n);
    if (d == 0.0) {
      if (segment_distance(x, a, b) == 0.0)
        throw QuadratureError("far-field point " + point_string(x) + " lies on the outer boundary");
      continue;
    }
    const double ad = std::abs(d);
    const double phi_a = std::atan2(dot(a - x, u), ad), phi_b = std::atan2(dot(b - x, u), ad);
    const double span = phi_b - phi_a;
    const int n_pts = std::clamp(static_cast<int>(std::ceil(angular_order * std::abs(span) / (2.0 * M_PI))), 2,
                                 std::max(2, angular_order));
    const LineRule& gl = gauss_legendre(n_pts);
    double integral = 0.0;
    for (int k = 0; k < n_pts; ++k) integral += gl.w[k] * std::pow(std::cos(phi_a + gl.x[k] * span), 2.0 * s);
    total += (d > 0 ? 1.0 : -1.0) * std::pow(ad, -2.0 * s) * integral * span / (2.0 * s);
  }
  return total;
}

double far_field_circle(Point x, double R, double s, int angular_order) {
  if (angular_order < 1) throw std::invalid_argument("angular quadrature order must be positive");
  const double rx2 = dot(x, x);
  if (!(rx2 < R * R)) throw QuadratureError("far-field point " + point_string(x) + " is not inside the far circle");
  double sum = 0.0;
  for (int k = 0; k < angular_order; ++k) {
    const double th = 2.0 * M_PI * k / angular_order;
    const double xe = x.x * std::cos(th) + x.y * std::sin(th);
    const double rho = -xe + std::sqrt(xe * xe + R * R - rx2);
    sum += std::pow(rho, -2.0 * s);
  }
  return sum * (2.0 * M_PI / angular_order) / (2.0 * s);
}

double aux_weight(Point x, const Mesh& mesh, double s, const KernelWeight& sigma, const TailConfig& cfg) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.tags[t] == Subdomain::Exterior) sum += aux_rec(x, mesh.corners(t), s, sigma, cfg, 0);
  return sum;
}

double validate_tail(const TailConfig& cfg, const Mesh& mesh) {
  if (!(cfg.sigma_tail > 0.0)) throw std::invalid_argument("sigma_tail must be positive");
  if (cfg.angular_order < 1) throw std::invalid_argument("angular_order must be positive");
  double rmax = 0.0;
  for (int i = 0; i < mesh.num_domain_nodes; ++i) rmax = std::max(rmax, norm(mesh.nodes[i]));
  double R = cfg.far_radius;
  if (R == 0.0) R = mesh.far_radius > 0.0 ? mesh.far_radius : 2.0 * rmax;
  if (!(R > rmax)) {
    std::ostringstream os;
    os << "far radius " << R << " does not enclose the domain (max |node| = " << rmax << ")";
    throw std::invalid_argument(os.str());
  }
  if (mesh.has_auxiliary() && std::abs(R - mesh.far_radius) > 1e-12 * R) {
    std::ostringstream os;
    os << "far radius " << R << " differs from the mesh's far circle " << mesh.far_radius;
    throw std::invalid_argument(os.str());
  }
  return R;
}

double tail_weight(Point x, const Mesh& mesh, const TailConfig& cfg, double s, const KernelWeight& sigma) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order s must lie in (0, 1)");
  validate_tail(cfg, mesh);
  if (!mesh.geometry.inside(x) || !(mesh.geometry.distance_to_boundary(x) > 0.0))
    throw QuadratureError("tail point " + point_string(x) + " is not inside the domain");
  const double aux = aux_weight(x, mesh, s, sigma, cfg);
  return aux + cfg.sigma_tail * far_field_polygon(x, outer_boundary(mesh), s, cfg.angular_order);
}

}  // namespace nlfem
