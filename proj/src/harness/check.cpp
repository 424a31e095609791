// Self-checks behind `nlfem_cli check`. The reference values here are
// computed by routes that do not go through the code under test (uniform
// subdivision for pair integrals, closed forms elsewhere).

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfem/constants.hpp"
#include "nlfem/harness.hpp"
#include "nlfem/postprocess.hpp"
#include "nlfem/quadrature.hpp"
#include "nlfem/solver.hpp"
#include "nlfem/tail.hpp"

namespace nlfem::harness {

namespace {

CheckResult result(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

double rel_asymmetry(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
}

std::array<Point, 3> sub_triangle(const std::array<Point, 3>& t, int k) {
  const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  switch (k) {
    case 0: return {t[0], m01, m20};
    case 1: return {m01, t[1], m12};
    case 2: return {m20, m12, t[2]};
    default: return {m12, m20, m01};
  }
}

void subdivide(const std::array<Point, 3>& t, int level, std::vector<std::array<Point, 3>>& out) {
  if (level == 0) {
    out.push_back(t);
    return;
  }
  for (int k = 0; k < 4; ++k) subdivide(sub_triangle(t, k), level - 1, out);
}

std::array<double, 3> bary(const std::array<Point, 3>& c, Point p) {
  const double det = cross(c[1] - c[0], c[2] - c[0]);
  const double l1 = cross(p - c[0], c[2] - c[0]) / det;
  const double l2 = cross(c[1] - c[0], p - c[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

double area(const std::array<Point, 3>& c) { return 0.5 * std::abs(cross(c[1] - c[0], c[2] - c[0])); }

struct Sample {
  Point p;
  std::array<double, 3> lambda;
  double w;
};

std::vector<Sample> samples(const std::array<Point, 3>& t, int level, const TriangleRule& rule) {
  std::vector<std::array<Point, 3>> parts;
  subdivide(t, level, parts);
  std::vector<Sample> out;
  for (const auto& c : parts)
    for (int k = 0; k < rule.size(); ++k) {
      const Point x = rule.bary[k][0] * c[0] + rule.bary[k][1] * c[1] + rule.bary[k][2] * c[2];
      out.push_back({x, bary(t, x), rule.w[k] * area(c)});
    }
  return out;
}

// 6x6 block of a vertex-disjoint pair by uniform subdivision of both
// triangles, refined until the entries settle.
std::array<double, 36> disjoint_oracle(const std::array<Point, 3>& t, const std::array<Point, 3>& u, double s) {
  const TriangleRule& rule = triangle_rule(12);
  auto at_level = [&](int level) {
    const auto xs = samples(t, level, rule), ys = samples(u, level, rule);
    std::array<double, 36> a{};
    for (const auto& x : xs)
      for (const auto& y : ys) {
        const double k = x.w * y.w * std::pow(dot(x.p - y.p, x.p - y.p), -1.0 - s);
        const double d[6] = {x.lambda[0], x.lambda[1], x.lambda[2], -y.lambda[0], -y.lambda[1], -y.lambda[2]};
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) a[6 * i + j] += k * d[i] * d[j];
      }
    for (double& v : a) v *= 0.5 * cns(2, s);
    return a;
  };
  auto prev = at_level(0);
  for (int level = 1; level <= 3; ++level) {
    auto next = at_level(level);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < 36; ++i) {
      diff = std::max(diff, std::abs(next[i] - prev[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    prev = next;
    if (diff <= 1e-12 * scale) break;
  }
  return prev;
}

}  // namespace

std::vector<CheckResult> property_suite() {
  std::vector<CheckResult> out;
  const GeometrySpec sq = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5}, 0.0);
  const Mesh mesh = build_mesh(sq, 0.2);

  double asym = 0.0, galerkin = 0.0;
  int chol_fail = 0, systems = 0;
  for (EnergyKind e : {EnergyKind::EI, EnergyKind::EII})
    for (double s : {0.25, 0.5, 0.75, 0.99}) {
      ProblemSpec ps;
      ps.energy = e;
      ps.s = s;
      ps.geometry = sq;
      if (e == EnergyKind::EI && s <= 0.5) continue;
      const LinearSystem sys = build_system(ps, mesh);
      asym = std::max(asym, rel_asymmetry(sys.A));
      const SymmetricFactorization f(sys.A);
      if (e == EnergyKind::EII) {
        ++systems;
        if (!f.positive_definite()) ++chol_fail;
      }
      const Eigen::VectorXd u = f.solve(sys.b);
      const double uau = u.dot(sys.A * u), bu = sys.b.dot(u);
      galerkin = std::max(galerkin, std::abs(uau - bu) / std::abs(bu));
    }
  out.push_back(result("matrix symmetry (relative)", asym, 1e-12));
  out.push_back(result("Cholesky failures among E_II systems", chol_fail, 0.0, std::to_string(systems) + " systems"));
  out.push_back(result("Galerkin identity u^T A u = b^T u (relative)", galerkin, 1e-10));

  {
    // Linear in the weight, the far-field constant included.
    const double s = 0.6;
    const KernelWeight s1{0.0, [](Point x, Point y) { return 1.0 + 0.25 * (x.x + y.x) * (x.x + y.x); }};
    const KernelWeight s2{0.0, [](Point x, Point y) { return 2.0 + std::cos(x.x * y.x) + 0.5 * (x.y + y.y); }};
    const KernelWeight mix{0.0, [&](Point x, Point y) { return 3.0 * s1(x, y) - 0.5 * s2(x, y); }};
    TailConfig c1, c2, cm;
    c1.sigma_tail = 1.0;
    c2.sigma_tail = 2.0;
    cm.sigma_tail = 3.0 * c1.sigma_tail - 0.5 * c2.sigma_tail;
    const IndexMap map = interior_dofs(mesh);
    const Eigen::MatrixXd a1 = assemble_nonlocal_full(mesh, s, s1, c1, {}, map);
    const Eigen::MatrixXd a2 = assemble_nonlocal_full(mesh, s, s2, c2, {}, map);
    const Eigen::MatrixXd am = assemble_nonlocal_full(mesh, s, mix, cm, {}, map);
    const double err = (am - (3.0 * a1 - 0.5 * a2)).cwiseAbs().maxCoeff() / am.cwiseAbs().maxCoeff();
    out.push_back(result("kernel-weight linearity (relative)", err, 1e-12));
  }

  {
    QuadratureConfig q;
    q.near_degree = q.far_degree = 16;
    double worst = 0.0;
    const std::array<Point, 3> t{{{0.0, 0.0}, {1.0, 0.0}, {0.2, 0.9}}};
    const std::pair<Point, double> cases[] = {{{1.6, 0.1}, 0.2}, {{3.5, -1.0}, 0.5}, {{0.5, 1.4}, 0.9}};
    for (const auto& [shift, s] : cases) {
      const std::array<Point, 3> u{{t[0] + shift, t[2] + shift, t[1] + shift}};
      TriangleRef rt{{0, 1, 2}, t}, ru{{3, 4, 5}, u};
      const PairBlock blk = pair_interaction(rt, ru, s, KernelWeight::constant(1.0), q);
      const auto ref = disjoint_oracle(t, u, s);
      double scale = 0.0;
      for (double v : ref) scale = std::max(scale, std::abs(v));
      for (int i = 0; i < 36; ++i) worst = std::max(worst, std::abs(blk.a[i] - ref[i]) / scale);
    }
    out.push_back(result("disjoint pair vs subdivision oracle (relative)", worst, 1e-8));
  }

  {
    const double v = far_field_circle({0.0, 0.0}, 2.0, 0.5, 64);
    out.push_back(result("far-field weight at the center of B(0,2), s = 1/2, vs pi", std::abs(v - M_PI) / M_PI, 1e-6));
  }

  {
    const GeometrySpec g = GeometrySpec::rect({0.0, 1.0, 0.0, 1.0});
    const Mesh m = build_mesh(g, 0.15, MeshOptions{.auxiliary = false});
    const ScottZhang affine = scott_zhang(m, [](Point p) { return 1.0 + 2.0 * p.x - 3.0 * p.y; });
    double err = 0.0;
    for (int v = 0; v < m.num_domain_nodes; ++v) {
      const Point p = m.nodes[v];
      err = std::max(err, std::abs(affine.interpolant.values[v] - (1.0 + 2.0 * p.x - 3.0 * p.y)));
    }
    out.push_back(result("Scott-Zhang reproduces affine functions", err, 1e-12));
    const ScottZhang bump = scott_zhang(m, [](Point p) {
      const double r2 = dot(p - Point{0.5, 0.5}, p - Point{0.5, 0.5});
      return r2 < 0.09 ? std::pow(0.09 - r2, 2) : 0.0;
    });
    double on_boundary = 0.0;
    for (int v : m.boundary_nodes) on_boundary = std::max(on_boundary, std::abs(bump.interpolant.values[v]));
    out.push_back(result("Scott-Zhang of a compactly supported function on the boundary", on_boundary, 0.0));
  }

  out.push_back(result("cns(2, 1/2) vs 1/(2 pi)", std::abs(cns(2, 0.5) - 0.5 / M_PI) / (0.5 / M_PI), 1e-13));
  out.push_back(result("bessel_eigenvalue(0, 1) vs j_{0,1}^2 / 4",
                       std::abs(bessel_eigenvalue(0, 1) - 1.4457964907366961), 1e-9));
  return out;
}

}  // namespace nlfem::harness
