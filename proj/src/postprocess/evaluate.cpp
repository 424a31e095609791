#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfem/postprocess.hpp"

namespace nlfem {

namespace {

std::string point_string(Point p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

std::array<double, 3> barycentric(const std::array<Point, 3>& c, Point p) {
  const double det = cross(c[1] - c[0], c[2] - c[0]);
  const double l1 = cross(p - c[0], c[2] - c[0]) / det;
  const double l2 = cross(c[1] - c[0], p - c[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

const Mesh& mesh_of(const Solution& sol) {
  if (!sol.mesh) throw EvaluationError("solution is not attached to a mesh");
  return *sol.mesh;
}

}  // namespace

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  double x1 = -1e300, y1 = -1e300;
  x0_ = y0_ = 1e300;
  int count = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    ++count;
    for (Point p : mesh.corners(t)) {
      x0_ = std::min(x0_, p.x);
      y0_ = std::min(y0_, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  if (count == 0) return;
  const double w = std::max(x1 - x0_, 1e-300), h = std::max(y1 - y0_, 1e-300);
  const double cells = std::max(1.0, std::sqrt(static_cast<double>(count)));
  cell_ = std::max(w, h) / cells;
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - x0_) / cell_)), 0, nx_ - 1); };
  auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - y0_) / cell_)), 0, ny_ - 1); };
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const auto c = mesh.corners(t);
    const double tol = 1e-12 * cell_;
    const int i0 = cx(std::min({c[0].x, c[1].x, c[2].x}) - tol), i1 = cx(std::max({c[0].x, c[1].x, c[2].x}) + tol);
    const int j0 = cy(std::min({c[0].y, c[1].y, c[2].y}) - tol), j1 = cy(std::max({c[0].y, c[1].y, c[2].y}) + tol);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

PointLocator::Hit PointLocator::locate(Point p) const {
  Hit hit;
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw EvaluationError("cannot locate the nonfinite point " + point_string(p));
  if (buckets_.empty()) return hit;
  const double tol = 1e-12 * cell_;
  if (p.x < x0_ - tol || p.y < y0_ - tol || p.x > x0_ + nx_ * cell_ + tol || p.y > y0_ + ny_ * cell_ + tol) return hit;
  const int i = std::clamp(static_cast<int>(std::floor((p.x - x0_) / cell_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - y0_) / cell_)), 0, ny_ - 1);
  double best = -1e300;
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto l = barycentric(mesh_->corners(t), p);
    const double worst = std::min({l[0], l[1], l[2]});
    if (worst > best) {
      best = worst;
      hit.triangle = t;
      hit.bary = l;
    }
  }
  if (best < -1e-10) hit.triangle = -1;
  return hit;
}

std::vector<double> evaluate(const Solution& sol, const std::vector<Point>& points) {
  const Mesh& mesh = mesh_of(sol);
  const PointLocator loc(mesh);
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto hit = loc.locate(points[k]);
    if (hit.triangle < 0) continue;
    const Triangle& t = mesh.triangles[hit.triangle];
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += hit.bary[i] * sol.values[t[i]];
    out[k] = v;
  }
  return out;
}

double evaluate(const Solution& sol, Point p) { return evaluate(sol, std::vector<Point>{p})[0]; }

double normal_derivative_at(const Solution& sol, const Mesh& mesh, Point p, Subdomain side) {
  const double tol = 1e-10;
  bool on_interface = false;
  for (const Edge& e : mesh.interface_edges)
    if (segment_distance(p, mesh.nodes[e[0]], mesh.nodes[e[1]]) <= tol) on_interface = true;
  if (!on_interface) throw EvaluationError("point " + point_string(p) + " is not on a discrete interface edge");
  Point grad{0.0, 0.0};
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] != side) continue;
    const auto c = mesh.corners(t);
    const auto l = barycentric(c, p);
    if (std::min({l[0], l[1], l[2]}) < -tol) continue;
    const double det = cross(c[1] - c[0], c[2] - c[0]);
    Point g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const Point e = c[(i + 2) % 3] - c[(i + 1) % 3];
      g = g + (sol.values[mesh.triangles[t][i]] / det) * Point{-e.y, e.x};
    }
    const double a = 0.5 * std::abs(det);
    grad = grad + a * g;
    total += a;
  }
  if (total == 0.0) throw EvaluationError("no triangle of the requested side touches " + point_string(p));
  grad = (1.0 / total) * grad;
  return dot(grad, mesh.geometry.interface_normal(p));
}

std::vector<SliceSample> slice(const Solution& sol, Point a, Point b, int m, bool include_start) {
  if (m < 1 || (include_start && m < 2)) throw std::invalid_argument("slice needs at least one sample past the start");
  const double len = distance(a, b);
  std::vector<Point> pts;
  std::vector<double> ts;
  for (int i = include_start ? 0 : 1; i <= (include_start ? m - 1 : m); ++i) {
    const double f = include_start ? static_cast<double>(i) / (m - 1) : static_cast<double>(i) / m;
    pts.push_back(a + f * (b - a));
    ts.push_back(f * len);
  }
  const auto v = evaluate(sol, pts);
  std::vector<SliceSample> out;
  for (std::size_t k = 0; k < pts.size(); ++k) out.push_back({ts[k], v[k]});
  return out;
}

}  // namespace nlfem
