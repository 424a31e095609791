#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace oracle {

namespace {

using Block = std::array<double, 36>;
constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre from Boost, mapped to [a, b].
template <class F>
void gauss16(double a, double b, F&& f) {
  using G = boost::math::quadrature::gauss<double, 16>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) {
      f(c, r * w[k]);
    } else {
      f(c - r * x[k], r * w[k]);
      f(c + r * x[k], r * w[k]);
    }
  }
}

Block block_gauss(double a, double b, const std::function<void(double, Block&)>& g) {
  Block out{};
  Block tmp;
  gauss16(a, b, [&](double t, double w) {
    tmp.fill(0.0);
    g(t, tmp);
    for (int i = 0; i < 36; ++i) out[i] += w * tmp[i];
  });
  return out;
}

// Interval bisection until the two halves reproduce the whole.
Block adaptive(double a, double b, const std::function<void(double, Block&)>& g, const Block& whole, int depth) {
  const double m = 0.5 * (a + b);
  const Block l = block_gauss(a, m, g), r = block_gauss(m, b, g);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < 36; ++i) {
    diff = std::max(diff, std::abs(l[i] + r[i] - whole[i]));
    scale = std::max(scale, std::abs(l[i] + r[i]));
  }
  if (diff <= 1e-13 * scale || depth >= 30) {
    Block out;
    for (int i = 0; i < 36; ++i) out[i] = l[i] + r[i];
    return out;
  }
  const Block lo = adaptive(a, m, g, l, depth + 1), hi = adaptive(m, b, g, r, depth + 1);
  Block out;
  for (int i = 0; i < 36; ++i) out[i] = lo[i] + hi[i];
  return out;
}

Block integrate(double a, double b, const std::function<void(double, Block&)>& g) {
  return adaptive(a, b, g, block_gauss(a, b, g), 0);
}

// Collapsed tensor Gauss rule on a triangle: points and weights summing to the area.
void triangle_points(const Tri& c, const std::function<void(Point, double)>& f) {
  const double area = 0.5 * std::abs(nlfem::cross(c[1] - c[0], c[2] - c[0]));
  gauss16(0.0, 1.0, [&](double u, double wu) {
    gauss16(0.0, 1.0, [&](double v, double wv) {
      const double l1 = u, l2 = (1.0 - u) * v;
      const Point x = c[0] + l1 * (c[1] - c[0]) + l2 * (c[2] - c[0]);
      f(x, 2.0 * area * wu * wv * (1.0 - u));
    });
  });
}

std::array<Tri, 4> children(const Tri& t) {
  const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  return {Tri{t[0], m01, m20}, Tri{m01, t[1], m12}, Tri{m20, m12, t[2]}, Tri{m12, m20, m01}};
}

// Affine functions of the nodes: barycentric on their own triangle, zero if
// the node is not a vertex of it. value + grad . (p - origin).
struct Affine {
  double value = 0.0;
  Point grad{};
  Point origin{};
  double operator()(Point p) const { return value + nlfem::dot(grad, p - origin); }
};

std::array<Affine, 3> barycentric(const Tri& t) {
  const double det = nlfem::cross(t[1] - t[0], t[2] - t[0]);
  std::array<Affine, 3> out;
  for (int i = 0; i < 3; ++i) {
    const Point a = t[(i + 1) % 3], b = t[(i + 2) % 3];
    // lambda_i vanishes on the opposite edge [a, b].
    const Point e = b - a;
    out[i].grad = Point{-e.y, e.x};
    out[i].grad = (1.0 / det) * out[i].grad;
    out[i].origin = a;
    out[i].value = 0.0;
  }
  return out;
}

// [r0, r1] of the ray x + r e inside the (closed) triangle.
bool clip(const Tri& u, Point x, Point e, double& r0, double& r1) {
  r0 = 0.0;
  r1 = std::numeric_limits<double>::infinity();
  const double orient = nlfem::cross(u[1] - u[0], u[2] - u[0]) > 0 ? 1.0 : -1.0;
  for (int k = 0; k < 3; ++k) {
    const Point a = u[k], b = u[(k + 1) % 3];
    const Point n = orient * Point{-(b - a).y, (b - a).x};  // inward
    const double c0 = nlfem::dot(n, x - a), c1 = nlfem::dot(n, e);
    if (c1 == 0.0) {
      if (c0 < 0.0) return false;
    } else if (c1 > 0.0) {
      r0 = std::max(r0, -c0 / c1);
    } else {
      r1 = std::min(r1, -c0 / c1);
    }
  }
  return r1 > r0;
}

double power_integral(double r0, double r1, double p) {
  // int_{r0}^{r1} r^p dr
  if (std::abs(p + 1.0) < 1e-14) return std::log(r1 / r0);
  return (std::pow(r1, p + 1.0) - (r0 > 0.0 ? std::pow(r0, p + 1.0) : 0.0)) / (p + 1.0);
}

double angle_of(Point v) { return std::atan2(v.y, v.x); }

bool inside_closed(const Tri& t, Point p, double tol) {
  const double d = nlfem::cross(t[1] - t[0], t[2] - t[0]);
  const double l1 = nlfem::cross(p - t[0], t[2] - t[0]) / d, l2 = nlfem::cross(t[1] - t[0], p - t[0]) / d;
  return l1 >= -tol && l2 >= -tol && 1.0 - l1 - l2 >= -tol;
}

}  // namespace

double cns_fourier(int n, double s) {
  // I(s) = int_0^inf (1 - cos t) t^{-1-2s} dt = Gamma(1-2s) cos(pi s) / (2s).
  const double one_d = std::abs(s - 0.5) < 1e-12 ? kPi / 2.0 : std::tgamma(1.0 - 2.0 * s) * std::cos(kPi * s) / (2.0 * s);
  if (n == 1) return 1.0 / (2.0 * one_d);
  if (n == 2) {
    // int_0^{2 pi} |cos theta|^{2s} dtheta
    const double ang = 2.0 * std::sqrt(kPi) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0);
    return 1.0 / (ang * one_d);
  }
  throw std::invalid_argument("cns_fourier: n must be 1 or 2");
}

std::array<double, 36> polar_pair(const Tri& t, const std::array<int, 3>& tid, const Tri& u,
                                  const std::array<int, 3>& uid, double s, int depth) {
  // Node list: T's vertices, then U's others.
  std::array<int, 6> nodes{};
  int n = 0;
  for (int id : tid) nodes[n++] = id;
  for (int id : uid)
    if (std::find(tid.begin(), tid.end(), id) == tid.end()) nodes[n++] = id;
  const auto bt = barycentric(t), bu = barycentric(u);
  std::array<Affine, 6> ft{}, fu{};
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      if (tid[i] == nodes[k]) {
        ft[k] = bt[i];
      }
      if (uid[i] == nodes[k]) fu[k] = bu[i];
    }
  }
  int shared = 0;
  std::vector<Point> shared_pts;
  for (int i = 0; i < 3; ++i)
    if (std::find(uid.begin(), uid.end(), tid[i]) != uid.end()) {
      ++shared;
      shared_pts.push_back(t[i]);
    }
  const bool identical = shared == 3;
  const double diam = std::max({nlfem::distance(t[0], t[1]), nlfem::distance(t[1], t[2]), nlfem::distance(t[2], t[0])});
  const double tol = 1e-12 * diam;

  // Does the child touch the set where the integrand in x is rough?
  auto touches = [&](const Tri& c) {
    for (const Point& p : c) {
      if (identical) {
        for (int k = 0; k < 3; ++k)
          if (nlfem::segment_distance(p, t[k], t[(k + 1) % 3]) <= tol) return true;
      } else if (shared == 2) {
        if (nlfem::segment_distance(p, shared_pts[0], shared_pts[1]) <= tol) return true;
      } else if (shared == 1) {
        if (nlfem::distance(p, shared_pts[0]) <= tol) return true;
      }
    }
    return false;
  };

  // F(x): angular integral of the radial closed forms.
  auto at_x = [&](Point x, Block& acc, double wx) {
    std::array<double, 6> a{};
    for (int k = 0; k < n; ++k) a[k] = ft[k](x) - fu[k](x);
    if (identical) a.fill(0.0);
    auto ray = [&](double theta, Block& out) {
      const Point e{std::cos(theta), std::sin(theta)};
      double r0, r1;
      if (!clip(u, x, e, r0, r1)) return;
      if (identical) r0 = 0.0;
      const double i0 = identical ? 0.0 : power_integral(r0, r1, -1.0 - 2.0 * s);
      const double i1 = identical ? 0.0 : power_integral(r0, r1, -2.0 * s);
      const double i2 = power_integral(r0, r1, 1.0 - 2.0 * s);
      std::array<double, 6> b{};
      for (int k = 0; k < n; ++k) b[k] = -nlfem::dot(fu[k].grad, e);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[6 * i + j] = a[i] * a[j] * i0 + (a[i] * b[j] + a[j] * b[i]) * i1 + b[i] * b[j] * i2;
    };
    std::vector<double> breaks;
    if (identical) {
      for (const Point& v : u) {
        double th = angle_of(v - x);
        if (th < 0) th += 2.0 * kPi;
        breaks.push_back(th);
      }
      std::sort(breaks.begin(), breaks.end());
      breaks.push_back(breaks.front() + 2.0 * kPi);
    } else {
      const Point c = (1.0 / 3.0) * (u[0] + u[1] + u[2]);
      const double ref = angle_of(c - x);
      for (const Point& v : u) {
        if (nlfem::distance(v, x) <= tol) continue;
        double d = angle_of(v - x) - ref;
        while (d > kPi) d -= 2.0 * kPi;
        while (d <= -kPi) d += 2.0 * kPi;
        breaks.push_back(ref + d);
      }
      std::sort(breaks.begin(), breaks.end());
    }
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      if (breaks[k + 1] - breaks[k] <= 1e-15) continue;
      const Block part = integrate(breaks[k], breaks[k + 1], ray);
      for (int i = 0; i < 36; ++i) acc[i] += wx * part[i];
    }
  };

  Block total{};
  std::function<void(const Tri&, int)> walk = [&](const Tri& c, int level) {
    if (level < depth && touches(c)) {
      for (const Tri& ch : children(c)) walk(ch, level + 1);
      return;
    }
    triangle_points(c, [&](Point x, double w) { at_x(x, total, w); });
  };
  walk(t, 0);
  const double c2 = 0.5 * cns_fourier(2, s);
  for (double& v : total) v *= c2;
  return total;
}

std::array<double, 36> polar_pair_extrapolated(const Tri& t, const std::array<int, 3>& tid, const Tri& u,
                                               const std::array<int, 3>& uid, double s, int depth) {
  int shared = 0;
  for (int id : tid) shared += std::find(uid.begin(), uid.end(), id) != uid.end();
  const double p = (shared == 1 ? 4.0 : 3.0) - 2.0 * s;
  const double q1 = std::pow(2.0, p), q2 = std::pow(2.0, p + 1.0);
  const Block a = polar_pair(t, tid, u, uid, s, depth - 2), b = polar_pair(t, tid, u, uid, s, depth - 1),
              c = polar_pair(t, tid, u, uid, s, depth);
  Block out;
  for (int i = 0; i < 36; ++i) {
    const double ab = (q1 * b[i] - a[i]) / (q1 - 1.0), bc = (q1 * c[i] - b[i]) / (q1 - 1.0);
    out[i] = (q2 * bc - ab) / (q2 - 1.0);
  }
  return out;
}

std::array<double, 36> subdivided_pair(const Tri& t, const Tri& u, double s, int max_level) {
  struct Sample {
    Point p;
    std::array<double, 3> lambda;
    double w;
  };
  auto samples = [&](const Tri& tri, int level) {
    std::vector<Tri> parts{tri};
    for (int l = 0; l < level; ++l) {
      std::vector<Tri> next;
      for (const Tri& c : parts)
        for (const Tri& ch : children(c)) next.push_back(ch);
      parts.swap(next);
    }
    const auto lam = barycentric(tri);
    std::vector<Sample> out;
    for (const Tri& c : parts)
      triangle_points(c, [&](Point x, double w) {
        out.push_back({x, {lam[0](x), lam[1](x), lam[2](x)}, w});
      });
    return out;
  };
  auto at_level = [&](int level) {
    const auto xs = samples(t, level), ys = samples(u, level);
    Block a{};
    for (const auto& x : xs)
      for (const auto& y : ys) {
        const Point d = x.p - y.p;
        const double k = x.w * y.w * std::pow(nlfem::dot(d, d), -1.0 - s);
        const double g[6] = {x.lambda[0], x.lambda[1], x.lambda[2], -y.lambda[0], -y.lambda[1], -y.lambda[2]};
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) a[6 * i + j] += k * g[i] * g[j];
      }
    const double c2 = 0.5 * cns_fourier(2, s);
    for (double& v : a) v *= c2;
    return a;
  };
  Block prev = at_level(0);
  for (int level = 1; level <= max_level; ++level) {
    const Block next = at_level(level);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < 36; ++i) {
      diff = std::max(diff, std::abs(next[i] - prev[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    prev = next;
    if (diff <= 1e-13 * scale) break;
  }
  return prev;
}

double exterior_raycast(Point x, const std::vector<Point>& polygon, double s) {
  const std::size_t m = polygon.size();
  auto exit_distance = [&](double theta) {
    const Point e{std::cos(theta), std::sin(theta)};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const Point a = polygon[k], b = polygon[(k + 1) % m];
      const Point ab = b - a;
      const double den = nlfem::cross(e, ab);
      if (den == 0.0) continue;
      const double r = nlfem::cross(a - x, ab) / den;
      const double t = nlfem::cross(a - x, e) / den;
      if (r > 0.0 && t >= -1e-14 && t <= 1.0 + 1e-14) best = std::min(best, r);
    }
    return best;
  };
  std::vector<double> breaks;
  for (const Point& v : polygon) {
    double th = angle_of(v - x);
    if (th < 0) th += 2.0 * kPi;
    breaks.push_back(th);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(breaks.front() + 2.0 * kPi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] - breaks[k] <= 1e-15) continue;
    const Block part = integrate(breaks[k], breaks[k + 1], [&](double th, Block& out) {
      out[0] = std::pow(exit_distance(th), -2.0 * s);
    });
    total += part[0];
  }
  return total / (2.0 * s);
}

double bessel_zero(int m, int k) { return boost::math::cyl_bessel_j_zero(static_cast<double>(m), k); }

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed");
  return es.eigenvalues();
}

}  // namespace oracle
