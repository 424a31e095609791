// Element-pair integrals of the fractional kernel.
//
// Touching pairs are written in relative coordinates w in which the
// integrand is homogeneous of degree -2s near w = 0; the integration region
// is {M(w) <= 1} for a gauge M, and with w = r * nu, M(nu) = 1, the radial
// part integrates r^{m-1-2s} (1-r)^q exactly (constant weight) or by
// Gauss-Jacobi (variable weight). (1-r)^q comes from the fiber of the
// remaining coordinates. The faces {M = 1} are parametrized so that the
// cone Jacobian |det(nu, d nu)| is 1.
//
//  identical (m=2,q=2): z = t^ - s^ in the hexagon with vertices
//    (1,0),(0,1),(-1,1),(-1,0),(0,-1),(1,-1); fiber s^ in a scaled copy of K^.
//  shared edge (m=3,q=1): x = P0 + a e + b qT, y = P0 + c e + d qU,
//    w = (a - c, b, d), M = max(b, d - k) + max(k, 0); four faces.
//  shared vertex (m=4,q=0): x = P + JT s^, y = P + JU t^,
//    M = max(|s^|_1, |t^|_1); two faces.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlfem/constants.hpp"
#include "nlfem/pair_quadrature.hpp"
#include "nlfem/quadrature.hpp"

namespace nlfem {

namespace {

inline double kernel(Point d, double s) {
  const double r2 = d.x * d.x + d.y * d.y;
  return std::exp(-(1.0 + s) * std::log(r2));
}

void require_finite(double g, const char* where, Point x, Point y) {
  if (std::isfinite(g)) return;
  std::ostringstream os;
  os.precision(17);
  os << "nonfinite kernel value in " << where << " quadrature at x = (" << x.x << ", " << x.y << "), y = (" << y.x
     << ", " << y.y << ")";
  throw QuadratureError(os.str());
}

inline Point apply(const std::array<Point, 2>& J, double u, double v) {
  return {J[0].x * u + J[1].x * v, J[0].y * u + J[1].y * v};
}

void check_order(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream os;
    os << "fractional order s must lie in (0, 1), got " << s;
    throw QuadratureError(os.str());
  }
}

// Sub-triangle of a parent triangle given by the barycentric coordinates
// (with respect to the parent) of its three corners.
using SubTri = std::array<std::array<double, 3>, 3>;

constexpr SubTri kWhole{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

std::array<Point, 3> physical(const TriangleRef& t, const SubTri& sub) {
  std::array<Point, 3> out;
  for (int k = 0; k < 3; ++k)
    out[k] = sub[k][0] * t.pts[0] + sub[k][1] * t.pts[1] + sub[k][2] * t.pts[2];
  return out;
}

std::array<SubTri, 4> children(const SubTri& p) {
  auto mid = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  const auto m01 = mid(p[0], p[1]), m12 = mid(p[1], p[2]), m20 = mid(p[2], p[0]);
  return {SubTri{p[0], m01, m20}, SubTri{m01, p[1], m12}, SubTri{m20, m12, p[2]}, SubTri{m01, m12, m20}};
}

double diameter(const std::array<Point, 3>& p) {
  return std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
}

double area(const std::array<Point, 3>& p) { return 0.5 * std::abs(cross(p[1] - p[0], p[2] - p[0])); }

// Proper crossings only. Orientation values within rounding of zero count as
// collinear; touching and collinear overlap are left to segment_distance.
bool segments_cross(Point a, Point b, Point c, Point d) {
  const auto orient = [](Point u, Point v) {
    const double c = cross(u, v), tol = 1e-12 * std::sqrt(dot(u, u) * dot(v, v));
    return c > tol ? 1 : (c < -tol ? -1 : 0);
  };
  const int d1 = orient(b - a, c - a), d2 = orient(b - a, d - a);
  const int d3 = orient(d - c, a - c), d4 = orient(d - c, b - c);
  return d1 * d2 < 0 && d3 * d4 < 0;
}

// Accumulates the vertex-disjoint pair integral (without C/2) into acc,
// T's basis functions at local indices 0..2 and U's at 3..5.
void disjoint_rec(const TriangleRef& T, const SubTri& st, const TriangleRef& U, const SubTri& su, double s,
                  const KernelWeight& sigma, const QuadratureConfig& cfg, int depth, std::array<double, 36>& acc) {
  const auto pt = physical(T, st), pu = physical(U, su);
  int deg = disjoint_degree(pt, pu, cfg);
  if (deg == 0) {
    if (depth < cfg.max_split_depth) {
      if (diameter(pt) >= diameter(pu)) {
        for (const SubTri& c : children(st)) disjoint_rec(T, c, U, su, s, sigma, cfg, depth + 1, acc);
      } else {
        for (const SubTri& c : children(su)) disjoint_rec(T, st, U, c, s, sigma, cfg, depth + 1, acc);
      }
      return;
    }
    deg = cfg.near_degree;
  }
  const TriangleRule& rule = triangle_rule(deg);
  const int nq = rule.size();
  const double at = area(pt), au = area(pu);
  auto parent_bary = [&](const SubTri& sub, int q) {
    std::array<double, 3> b{};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) b[i] += rule.bary[q][k] * sub[k][i];
    return b;
  };
  for (int p = 0; p < nq; ++p) {
    const auto bx = parent_bary(st, p);
    const Point x = bx[0] * T.pts[0] + bx[1] * T.pts[1] + bx[2] * T.pts[2];
    const double wx = rule.w[p] * at;
    for (int q = 0; q < nq; ++q) {
      const auto by = parent_bary(su, q);
      const Point y = by[0] * U.pts[0] + by[1] * U.pts[1] + by[2] * U.pts[2];
      const double g = sigma(x, y) * kernel(x - y, s);
      require_finite(g, "disjoint-pair", x, y);
      const double k = g * wx * rule.w[q] * au;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          acc[6 * i + j] += k * bx[i] * bx[j];
          acc[6 * (3 + i) + 3 + j] += k * by[i] * by[j];
          acc[6 * i + 3 + j] -= k * bx[i] * by[j];
          acc[6 * (3 + i) + j] -= k * by[i] * bx[j];
        }
    }
  }
}

PairBlock identical(const TriangleRef& T, double s, const KernelWeight& sigma, const QuadratureConfig& cfg) {
  static constexpr std::array<Point, 7> hex{Point{1, 0},  Point{0, 1},  Point{-1, 1}, Point{-1, 0},
                                            Point{0, -1}, Point{1, -1}, Point{1, 0}};
  static constexpr std::array<Point, 3> ghat{Point{-1, -1}, Point{1, 0}, Point{0, 1}};
  const Point P0 = T.pts[0];
  const std::array<Point, 2> J{T.pts[1] - P0, T.pts[2] - P0};
  const double detJ = std::abs(cross(J[0], J[1]));
  const LineRule& gl = gauss_legendre(cfg.touching_order);

  std::array<double, 9> acc{};
  if (sigma.is_constant()) {
    for (int f = 0; f < 6; ++f)
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const Point nu = hex[f] + gl.x[k] * (hex[f + 1] - hex[f]);
        const Point jn = apply(J, nu.x, nu.y);
        const double g = kernel(jn, s);
        require_finite(g, "identical-pair", P0, P0);
        double dphi[3];
        for (int i = 0; i < 3; ++i) dphi[i] = dot(ghat[i], nu);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) acc[3 * i + j] += gl.w[k] * g * dphi[i] * dphi[j];
      }
    const double factor = detJ * detJ * radial_beta(2, 2, s) * 0.5 * sigma.value;
    for (double& v : acc) v *= factor;
  } else {
    const LineRule radial = gauss_jacobi(cfg.touching_order, 1.0 - 2.0 * s, 2.0);
    const TriangleRule& fiber = triangle_rule(std::min(kMaxTriangleDegree, std::max(1, cfg.touching_order)));
    for (int f = 0; f < 6; ++f)
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const Point nu = hex[f] + gl.x[k] * (hex[f + 1] - hex[f]);
        const Point jn = apply(J, nu.x, nu.y);
        const double g = kernel(jn, s);
        require_finite(g, "identical-pair", P0, P0);
        double sig = 0.0;
        for (std::size_t m = 0; m < radial.x.size(); ++m) {
          const double r = radial.x[m];
          const Point z = r * nu;
          const Point corner{std::max(0.0, -z.x), std::max(0.0, -z.y)};
          double inner = 0.0;
          for (int q = 0; q < fiber.size(); ++q) {
            const Point sh = corner + (1.0 - r) * Point{fiber.bary[q][1], fiber.bary[q][2]};
            const Point th = sh + z;
            inner += fiber.w[q] * sigma(P0 + apply(J, sh.x, sh.y), P0 + apply(J, th.x, th.y));
          }
          sig += radial.w[m] * 0.5 * inner;
        }
        double dphi[3];
        for (int i = 0; i < 3; ++i) dphi[i] = dot(ghat[i], nu);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) acc[3 * i + j] += gl.w[k] * g * sig * dphi[i] * dphi[j];
      }
    for (double& v : acc) v *= detJ * detJ;
  }
  PairBlock b;
  b.n = 3;
  for (int i = 0; i < 3; ++i) b.nodes[i] = T.ids[i];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = acc[3 * i + j];
  return b;
}

PairBlock shared_edge(const TriangleRef& T, const TriangleRef& U, double s, const KernelWeight& sigma,
                      const QuadratureConfig& cfg) {
  // Local positions in T of the shared vertices and of T's third vertex.
  int iT[3], uQ = -1;
  int n_shared = 0;
  int third_T = -1;
  for (int i = 0; i < 3; ++i) {
    bool shared = false;
    for (int j = 0; j < 3; ++j)
      if (T.ids[i] == U.ids[j]) shared = true;
    if (shared)
      iT[n_shared++] = i;
    else
      third_T = i;
  }
  for (int j = 0; j < 3; ++j)
    if (U.ids[j] != T.ids[iT[0]] && U.ids[j] != T.ids[iT[1]]) uQ = j;
  const Point P0 = T.pts[iT[0]], P1 = T.pts[iT[1]];
  const Point e = P1 - P0, qT = T.pts[third_T] - P0, qU = U.pts[uQ] - P0;
  const double jac = std::abs(cross(e, qT)) * std::abs(cross(e, qU));
  // Local basis order: T's vertices, then U's third vertex (index 3).
  const int loc[4] = {iT[0], iT[1], third_T, 3};

  const LineRule& gl = gauss_legendre(cfg.touching_order);
  const bool constant = sigma.is_constant();
  LineRule radial, fiber;
  if (!constant) {
    radial = gauss_jacobi(cfg.touching_order, 2.0 - 2.0 * s, 1.0);
    fiber = gauss_legendre(cfg.touching_order);
  }
  std::array<double, 16> acc{};
  auto add = [&](double k, double b, double d, double weight) {
    const Point dx = k * e + b * qT - d * qU;
    const double g = kernel(dx, s);
    require_finite(g, "shared-edge", P0, P1);
    double sig = sigma.value;
    if (!constant) {
      sig = 0.0;
      for (std::size_t m = 0; m < radial.x.size(); ++m) {
        const double r = radial.x[m];
        double inner = 0.0;
        for (std::size_t q = 0; q < fiber.x.size(); ++q) {
          const double a = std::max(0.0, r * k) + (1.0 - r) * fiber.x[q];
          const double c = a - r * k;
          inner += fiber.w[q] * sigma(P0 + a * e + (r * b) * qT, P0 + c * e + (r * d) * qU);
        }
        sig += radial.w[m] * inner;
      }
    }
    const double dphi[4] = {-k - b + d, k, b, -d};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) acc[4 * i + j] += weight * g * sig * dphi[i] * dphi[j];
  };
  const std::size_t n = gl.x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double u = gl.x[i], v = gl.x[j], w = gl.w[i] * gl.w[j];
      add(u, 1.0 - u, v, w);                        // b = 1 - k, k in [0,1], d in [0,1]
      add(u, (1.0 - u) * v, 1.0, w * (1.0 - u));    // d = 1, b in [0, 1 - k]
      add(-u, 1.0, (1.0 - u) * v, w * (1.0 - u));   // b = 1, k in [-1,0], d in [0, 1 + k]
      add(-u, v, 1.0 - u, w);                       // d = 1 + k, b in [0,1]
    }
  const double factor = jac * (constant ? radial_beta(3, 1, s) : 1.0);
  PairBlock blk;
  blk.n = 4;
  for (int i = 0; i < 3; ++i) blk.nodes[i] = T.ids[i];
  blk.nodes[3] = U.ids[uQ];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) blk(loc[i], loc[j]) = factor * acc[4 * i + j];
  return blk;
}

PairBlock shared_vertex(const TriangleRef& T, const TriangleRef& U, double s, const KernelWeight& sigma,
                        const QuadratureConfig& cfg) {
  int it = -1, iu = -1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (T.ids[i] == U.ids[j]) {
        it = i;
        iu = j;
      }
  const Point P = T.pts[it];
  const int a1 = (it + 1) % 3, a2 = (it + 2) % 3;
  const int b1 = (iu + 1) % 3, b2 = (iu + 2) % 3;
  const std::array<Point, 2> JT{T.pts[a1] - P, T.pts[a2] - P};
  const std::array<Point, 2> JU{U.pts[b1] - P, U.pts[b2] - P};
  const double jac = std::abs(cross(JT[0], JT[1])) * std::abs(cross(JU[0], JU[1]));
  const int loc[5] = {it, a1, a2, 3, 4};

  const LineRule& gl = gauss_legendre(cfg.touching_order);
  const TriangleRule& tri = triangle_rule(std::min(kMaxTriangleDegree, 2 * cfg.touching_order - 1));
  const bool constant = sigma.is_constant();
  LineRule radial;
  if (!constant) radial = gauss_jacobi(cfg.touching_order, 3.0 - 2.0 * s, 0.0);

  std::array<double, 25> acc{};
  auto add = [&](Point sh, Point th, double weight) {
    const Point dx = apply(JT, sh.x, sh.y) - apply(JU, th.x, th.y);
    const double g = kernel(dx, s);
    require_finite(g, "shared-vertex", P, P);
    double sig = sigma.value;
    if (!constant) {
      sig = 0.0;
      for (std::size_t m = 0; m < radial.x.size(); ++m) {
        const double r = radial.x[m];
        sig += radial.w[m] * sigma(P + r * apply(JT, sh.x, sh.y), P + r * apply(JU, th.x, th.y));
      }
    }
    const double dphi[5] = {-(sh.x + sh.y) + (th.x + th.y), sh.x, sh.y, -th.x, -th.y};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) acc[5 * i + j] += weight * g * sig * dphi[i] * dphi[j];
  };
  for (std::size_t i = 0; i < gl.x.size(); ++i)
    for (int q = 0; q < tri.size(); ++q) {
      const Point other{tri.bary[q][1], tri.bary[q][2]};
      const Point edge{1.0 - gl.x[i], gl.x[i]};
      const double w = gl.w[i] * tri.w[q] * 0.5;
      add(edge, other, w);
      add(other, edge, w);
    }
  const double factor = jac * (constant ? radial_beta(4, 0, s) : 1.0);
  PairBlock blk;
  blk.n = 5;
  for (int i = 0; i < 3; ++i) blk.nodes[i] = T.ids[i];
  blk.nodes[3] = U.ids[b1];
  blk.nodes[4] = U.ids[b2];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) blk(loc[i], loc[j]) = factor * acc[5 * i + j];
  return blk;
}

}  // namespace

KernelWeight KernelWeight::scaled(double c) const {
  if (is_constant()) return constant(c * value);
  auto f = fn;
  return KernelWeight{value, [f, c](Point x, Point y) { return c * f(x, y); }};
}

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::Identical: return "IDENTICAL";
    case PairClass::SharedEdge: return "SHARED_EDGE";
    case PairClass::SharedVertex: return "SHARED_VERTEX";
    case PairClass::Disjoint: return "DISJOINT";
  }
  return "?";
}

PairClass classify_pair(const Triangle& t, const Triangle& u) {
  int shared = 0;
  for (int a : t)
    for (int b : u)
      if (a == b) ++shared;
  switch (shared) {
    case 3: return PairClass::Identical;
    case 2: return PairClass::SharedEdge;
    case 1: return PairClass::SharedVertex;
    default: return PairClass::Disjoint;
  }
}

PairClass classify_pair(const Mesh& mesh, int t, int u) {
  const PairClass c = classify_pair(mesh.triangles[t], mesh.triangles[u]);
  if (c == PairClass::Disjoint && triangle_distance(mesh.corners(t), mesh.corners(u)) <= 0.0)
    throw QuadratureError("triangles " + std::to_string(t) + " and " + std::to_string(u) +
                          " overlap without sharing vertices (nonconforming mesh)");
  return c;
}

TriangleRef triangle_ref(const Mesh& mesh, int t) {
  TriangleRef r;
  r.ids = mesh.triangles[t];
  r.pts = mesh.corners(t);
  return r;
}

double triangle_distance(const std::array<Point, 3>& a, const std::array<Point, 3>& b) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (segments_cross(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3])) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      d = std::min(d, segment_distance(a[i], b[j], b[(j + 1) % 3]));
      d = std::min(d, segment_distance(b[i], a[j], a[(j + 1) % 3]));
    }
  return d;
}

int disjoint_degree(const std::array<Point, 3>& a, const std::array<Point, 3>& b, const QuadratureConfig& cfg) {
  const double d = triangle_distance(a, b);
  const double diam = std::max(diameter(a), diameter(b));
  if (d >= cfg.near_distance * diam) return cfg.far_degree;
  if (d >= cfg.split_distance * diam) return cfg.near_degree;
  return 0;
}

double radial_beta(int m, int q, double s) {
  // B(a, q + 1) = q! / (a (a+1) ... (a+q)) with a = m - 2s.
  const double a = m - 2.0 * s;
  double v = 1.0;
  for (int k = 1; k <= q; ++k) v *= k;
  for (int k = 0; k <= q; ++k) v /= (a + k);
  return v;
}

PairBlock pair_interaction(const TriangleRef& t, const TriangleRef& u, double s, const KernelWeight& sigma,
                           const QuadratureConfig& cfg) {
  check_order(s);
  if (cfg.touching_order < 1 || cfg.touching_order > 64)
    throw QuadratureError("touching-pair order must lie in [1, 64]");
  PairBlock b;
  switch (classify_pair(t.ids, u.ids)) {
    case PairClass::Identical: {
      // Align U's vertex order with T's (the integral is symmetric anyway).
      b = identical(t, s, sigma, cfg);
      break;
    }
    case PairClass::SharedEdge: b = shared_edge(t, u, s, sigma, cfg); break;
    case PairClass::SharedVertex: b = shared_vertex(t, u, s, sigma, cfg); break;
    case PairClass::Disjoint: {
      std::array<double, 36> acc{};
      disjoint_rec(t, kWhole, u, kWhole, s, sigma, cfg, 0, acc);
      b.n = 6;
      for (int i = 0; i < 3; ++i) {
        b.nodes[i] = t.ids[i];
        b.nodes[3 + i] = u.ids[i];
      }
      b.a = acc;
      break;
    }
  }
  const double half_c = 0.5 * cns(2, s);
  for (int i = 0; i < b.n; ++i)
    for (int j = 0; j < b.n; ++j) {
      b(i, j) *= half_c;
      if (!std::isfinite(b(i, j))) {
        std::ostringstream os;
        os.precision(17);
        os << "nonfinite pair integral between triangles at (" << t.pts[0].x << ", " << t.pts[0].y << ") and ("
           << u.pts[0].x << ", " << u.pts[0].y << ")";
        throw QuadratureError(os.str());
      }
    }
  return b;
}

PairBlock pair_interaction(const Mesh& mesh, int t, int u, double s, const KernelWeight& sigma,
                           const QuadratureConfig& cfg) {
  return pair_interaction(triangle_ref(mesh, t), triangle_ref(mesh, u), s, sigma, cfg);
}

}  // namespace nlfem
