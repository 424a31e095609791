// Parallel nonlocal assembly.
//
// Outer OMEGA2 triangles are dealt cyclically to the workers. Touching and
// near pairs go through pair_interaction. Well-separated pairs use the same
// low-degree tensor rule, but the two diagonal sub-blocks only depend on the
// partner through sum_q K(x_p, y_q) w_q, so those sums are collected per
// quadrature point (kappa) and turned into element matrices once at the end;
// only the off-diagonal 3x3 block is formed per pair. Worker buffers are
// reduced in worker order, so a fixed worker count gives bitwise-identical
// matrices.

#include <omp.h>

#include <algorithm>
#include <exception>
#include <sstream>

#include "nlfem/constants.hpp"
#include "nlfem/quadrature.hpp"
#include "nonlocal_common.hpp"

namespace nlfem {

namespace detail {

void check_inputs(const Mesh& mesh, double s, const IndexMap& map) {
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream os;
    os << "fractional order s must lie in (0, 1), got " << s;
    throw std::invalid_argument(os.str());
  }
  if (static_cast<int>(map.node_to_row.size()) != mesh.num_nodes())
    throw std::invalid_argument("index map does not match the mesh");
}

void add_far_field_mass(Eigen::MatrixXd& a, const Mesh& mesh, double s, const TailConfig& tail, const IndexMap& map,
                        int workers) {
  const OuterBoundary outer = outer_boundary(mesh);
  const TriangleRule& rule = triangle_rule(4);
  const int nq = rule.size();
  std::vector<int> tris;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.tags[t] == Subdomain::Omega2) tris.push_back(t);
  std::vector<double> w(tris.size() * nq);
  std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(std::max(1, workers))
  for (std::size_t k = 0; k < tris.size(); ++k) {
    try {
      const auto p = mesh.corners(tris[k]);
      for (int q = 0; q < nq; ++q) {
        const auto& l = rule.bary[q];
        w[k * nq + q] = far_field_polygon(l[0] * p[0] + l[1] * p[1] + l[2] * p[2], outer, s, tail.angular_order);
      }
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  const double c = cns(2, s) * tail.sigma_tail;
  for (std::size_t k = 0; k < tris.size(); ++k) {
    const Triangle& t = mesh.triangles[tris[k]];
    const double area = mesh.area(tris[k]);
    for (int q = 0; q < nq; ++q) {
      const auto& l = rule.bary[q];
      const double f = c * area * rule.w[q] * w[k * nq + q];
      for (int i = 0; i < 3; ++i) {
        const int r = map.node_to_row[t[i]];
        if (r < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int cc = map.node_to_row[t[j]];
          if (cc >= r) a(r, cc) += f * l[i] * l[j];
        }
      }
    }
  }
}

}  // namespace detail

namespace {

// Quadrature points of the separated-pair rule on every triangle.
struct FarPoints {
  int nq = 0;
  std::vector<Point> x;       // nq per triangle
  std::vector<double> w;      // weight times area
  std::vector<Point> center;  // centroid
  std::vector<double> radius; // max centroid-vertex distance
  std::vector<double> diam;
};

FarPoints far_points(const Mesh& mesh, const TriangleRule& rule) {
  FarPoints fp;
  fp.nq = rule.size();
  const int nt = mesh.num_triangles();
  fp.x.resize(static_cast<std::size_t>(nt) * fp.nq);
  fp.w.resize(fp.x.size());
  fp.center.resize(nt);
  fp.radius.resize(nt);
  fp.diam.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto p = mesh.corners(t);
    const double area = mesh.area(t);
    for (int q = 0; q < fp.nq; ++q) {
      const auto& l = rule.bary[q];
      fp.x[t * fp.nq + q] = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
      fp.w[t * fp.nq + q] = rule.w[q] * area;
    }
    fp.center[t] = mesh.barycenter(t);
    fp.radius[t] = std::max({distance(fp.center[t], p[0]), distance(fp.center[t], p[1]), distance(fp.center[t], p[2])});
    fp.diam[t] = mesh.diameter(t);
  }
  return fp;
}

struct Worker {
  Eigen::MatrixXd* a = nullptr;
  Eigen::MatrixXd own;
  std::vector<double> kappa;
};

Eigen::MatrixXd assemble(const Mesh& mesh, double s, const KernelWeight& sigma, const QuadratureConfig& quad,
                         const IndexMap& map, bool full, const AssemblyOptions& opts) {
  detail::check_inputs(mesh, s, map);
  const int n = map.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const detail::PairLists lists = detail::pair_lists(mesh, full);
  const TriangleRule& rule = triangle_rule(quad.far_degree);
  const FarPoints fp = far_points(mesh, rule);
  const int nq = fp.nq;
  const double half_c = 0.5 * cns(2, s);
  const double exponent = -(1.0 + s);

  int workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();
  const double buffer = 8.0 * n * static_cast<double>(n);
  if (buffer > 0) workers = std::max(1, std::min(workers, static_cast<int>(opts.memory_budget_bytes / buffer)));
  workers = std::max(1, std::min<int>(workers, static_cast<int>(lists.omega2.size())));

  std::vector<Worker> ws(workers);
  for (int w = 0; w < workers; ++w) {
    if (w == 0) {
      ws[w].a = &a;
    } else {
      ws[w].own = Eigen::MatrixXd::Zero(n, n);
      ws[w].a = &ws[w].own;
    }
    ws[w].kappa.assign(fp.x.size(), 0.0);
  }

  std::vector<char> has_rows(mesh.num_triangles(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t])
      if (map.node_to_row[v] >= 0) has_rows[t] = 1;

  std::exception_ptr error;
#pragma omp parallel num_threads(workers)
  {
    const int id = omp_get_thread_num();
    Worker& me = ws[id];
    Eigen::MatrixXd& acc = *me.a;
    std::vector<double> kxy(nq * nq);
    try {
      auto visit = [&](int t, int u, double weight) {
        const Triangle& tt = mesh.triangles[t];
        const Triangle& tu = mesh.triangles[u];
        bool shares = false;
        for (int i : tt)
          for (int j : tu)
            if (i == j) shares = true;
        bool separated = false;
        if (!shares) {
          const double maxdiam = std::max(fp.diam[t], fp.diam[u]);
          const double lower = distance(fp.center[t], fp.center[u]) - fp.radius[t] - fp.radius[u];
          separated = lower >= quad.near_distance * maxdiam ||
                      disjoint_degree(mesh.corners(t), mesh.corners(u), quad) == quad.far_degree;
        }
        if (!separated) {
          detail::scatter_upper(acc, map, pair_interaction(triangle_ref(mesh, t), triangle_ref(mesh, u), s, sigma, quad),
                                weight);
          return;
        }
        const Point* xt = &fp.x[t * nq];
        const Point* xu = &fp.x[u * nq];
        for (int p = 0; p < nq; ++p)
          for (int q = 0; q < nq; ++q) {
            const Point d = xt[p] - xu[q];
            double g = sigma(xt[p], xu[q]) * std::exp(exponent * std::log(d.x * d.x + d.y * d.y));
            if (!std::isfinite(g)) {
              std::ostringstream os;
              os.precision(17);
              os << "nonfinite kernel value in separated-pair quadrature at x = (" << xt[p].x << ", " << xt[p].y
                 << "), y = (" << xu[q].x << ", " << xu[q].y << ")";
              throw QuadratureError(os.str());
            }
            kxy[p * nq + q] = weight * g * fp.w[t * nq + p] * fp.w[u * nq + q];
          }
        for (int p = 0; p < nq; ++p) {
          double sum = 0.0;
          for (int q = 0; q < nq; ++q) sum += kxy[p * nq + q];
          me.kappa[t * nq + p] += sum;
        }
        if (!has_rows[u]) return;
        for (int q = 0; q < nq; ++q) {
          double sum = 0.0;
          for (int p = 0; p < nq; ++p) sum += kxy[p * nq + q];
          me.kappa[u * nq + q] += sum;
        }
        for (int i = 0; i < 3; ++i) {
          const int r = map.node_to_row[tt[i]];
          if (r < 0) continue;
          for (int j = 0; j < 3; ++j) {
            const int c = map.node_to_row[tu[j]];
            if (c < 0) continue;
            double v = 0.0;
            for (int p = 0; p < nq; ++p)
              for (int q = 0; q < nq; ++q) v += kxy[p * nq + q] * rule.bary[p][i] * rule.bary[q][j];
            if (r <= c)
              acc(r, c) -= half_c * v;
            else
              acc(c, r) -= half_c * v;
          }
        }
      };
      for (std::size_t k = id; k < lists.omega2.size(); k += workers) {
        const int t = lists.omega2[k];
        for (std::size_t m = k; m < lists.omega2.size(); ++m) {
          const int u = lists.omega2[m];
          visit(t, u, u == t ? 1.0 : 2.0);
        }
        for (int u : lists.others) visit(t, u, 2.0);
      }
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<double> kappa = std::move(ws[0].kappa);
  for (int w = 1; w < workers; ++w) {
    a += ws[w].own;
    ws[w].own.resize(0, 0);
    for (std::size_t k = 0; k < kappa.size(); ++k) kappa[k] += ws[w].kappa[k];
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!has_rows[t]) continue;
    const Triangle& tt = mesh.triangles[t];
    for (int p = 0; p < nq; ++p) {
      const double k = half_c * kappa[t * nq + p];
      if (k == 0.0) continue;
      for (int i = 0; i < 3; ++i) {
        const int r = map.node_to_row[tt[i]];
        if (r < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int c = map.node_to_row[tt[j]];
          if (c >= r) a(r, c) += k * rule.bary[p][i] * rule.bary[p][j];
        }
      }
    }
  }
  return a;
}

int resolved_workers(const AssemblyOptions& opts) { return opts.workers > 0 ? opts.workers : omp_get_max_threads(); }

}  // namespace

Eigen::MatrixXd assemble_nonlocal_censored(const Mesh& mesh, double s, const KernelWeight& sigma,
                                           const QuadratureConfig& quad, const IndexMap& map,
                                           const AssemblyOptions& opts) {
  Eigen::MatrixXd a = assemble(mesh, s, sigma, quad, map, false, opts);
  detail::mirror_upper(a);
  return a;
}

Eigen::MatrixXd assemble_nonlocal_censored(const Mesh& mesh, double s, const KernelWeight& sigma,
                                           const QuadratureConfig& quad) {
  return assemble_nonlocal_censored(mesh, s, sigma, quad, domain_nodes(mesh));
}

Eigen::MatrixXd assemble_nonlocal_full(const Mesh& mesh, double s, const KernelWeight& sigma, const TailConfig& tail,
                                       const QuadratureConfig& quad, const IndexMap& map,
                                       const AssemblyOptions& opts) {
  validate_tail(tail, mesh);
  Eigen::MatrixXd a = assemble(mesh, s, sigma, quad, map, true, opts);
  detail::add_far_field_mass(a, mesh, s, tail, map, resolved_workers(opts));
  detail::mirror_upper(a);
  return a;
}

Eigen::MatrixXd assemble_nonlocal_full(const Mesh& mesh, double s, const KernelWeight& sigma, const TailConfig& tail,
                                       const QuadratureConfig& quad) {
  return assemble_nonlocal_full(mesh, s, sigma, tail, quad, domain_nodes(mesh));
}

}  // namespace nlfem
