#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

namespace nlfem::detail {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

double sign_of(const Rational& q) { return q > 0 ? 1.0 : (q < 0 ? -1.0 : 0.0); }

double orient_exact(Point a, Point b, Point c) {
  const Rational acx = Rational(a.x) - Rational(c.x), bcx = Rational(b.x) - Rational(c.x);
  const Rational acy = Rational(a.y) - Rational(c.y), bcy = Rational(b.y) - Rational(c.y);
  return sign_of(acx * bcy - acy * bcx);
}

double incircle_exact(Point a, Point b, Point c, Point d) {
  const Rational adx = Rational(a.x) - Rational(d.x), ady = Rational(a.y) - Rational(d.y);
  const Rational bdx = Rational(b.x) - Rational(d.x), bdy = Rational(b.y) - Rational(d.y);
  const Rational cdx = Rational(c.x) - Rational(d.x), cdy = Rational(c.y) - Rational(d.y);
  const Rational alift = adx * adx + ady * ady;
  const Rational blift = bdx * bdx + bdy * bdy;
  const Rational clift = cdx * cdx + cdy * cdy;
  return sign_of(alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                 clift * (adx * bdy - bdx * ady));
}

}  // namespace

double orient2d(Point a, Point b, Point c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > kOrientBound * detsum) return det;
  return orient_exact(a, b, c);
}

double incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > kInCircleBound * permanent) return det;
  return incircle_exact(a, b, c, d);
}

Point circumcenter(Point a, Point b, Point c) {
  const Point ba = b - a, ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double b2 = dot(ba, ba), c2 = dot(ca, ca);
  return {a.x + (ca.y * b2 - ba.y * c2) / d, a.y + (ba.x * c2 - ca.x * b2) / d};
}

Delaunay::Delaunay(Point center, double radius) {
  const double m = 64.0 * radius;
  for (int k = 0; k < 3; ++k) {
    const double th = std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / 3.0;
    pts_.push_back({center.x + m * std::cos(th), center.y + m * std::sin(th)});
  }
  DTri t;
  t.v = {0, 1, 2};
  t.alive = true;
  tris_.push_back(t);
  vert_tri_ = {0, 0, 0};
}

int Delaunay::new_triangle() {
  if (!free_.empty()) {
    const int t = free_.back();
    free_.pop_back();
    return t;
  }
  tris_.emplace_back();
  return static_cast<int>(tris_.size()) - 1;
}

int Delaunay::locate(Point p, int hint) const {
  int t = hint;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = vert_tri_.back();
  const std::size_t max_steps = 4 * tris_.size() + 100;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const DTri& tr = tris_[t];
    const int start = static_cast<int>(walk_counter_++ % 3);
    bool moved = false;
    for (int k = 0; k < 3; ++k) {
      const int i = (start + k) % 3;
      const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
      if (orient2d(pts_[a], pts_[b], p) < 0.0) {
        if (tr.nb[i] < 0) throw MeshError("point lies outside the enclosing triangle");
        t = tr.nb[i];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  throw MeshError("point location did not terminate");
}

std::vector<int> Delaunay::cavity(Point p, int start) const {
  mark_.resize(tris_.size(), 0);
  ++stamp_;
  std::vector<int> result{start};
  mark_[start] = stamp_;
  for (std::size_t k = 0; k < result.size(); ++k) {
    const DTri& tr = tris_[result[k]];
    for (int i = 0; i < 3; ++i) {
      const int n = tr.nb[i];
      if (n < 0 || mark_[n] == stamp_) continue;
      mark_[n] = stamp_;
      const DTri& nt = tris_[n];
      if (incircle(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p) > 0.0) result.push_back(n);
    }
  }
  return result;
}

int Delaunay::insert(Point p, int hint, std::vector<Edge>* removed_edges) {
  const int t = locate(p, hint);
  for (int v : tris_[t].v)
    if (pts_[v] == p) return v;
  return insert_with_cavity(p, cavity(p, t), removed_edges);
}

int Delaunay::insert_with_cavity(Point p, const std::vector<int>& cav, std::vector<Edge>* removed_edges) {
  const int vid = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vert_tri_.push_back(-1);

  mark_.resize(tris_.size(), 0);
  ++stamp_;
  for (int t : cav) mark_[t] = stamp_;

  struct Rim {
    int a, b, outside;
  };
  std::vector<Rim> rim;
  for (int t : cav) {
    const DTri& tr = tris_[t];
    for (int i = 0; i < 3; ++i) {
      const int n = tr.nb[i];
      if (removed_edges) removed_edges->push_back(make_edge(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3]));
      if (n >= 0 && mark_[n] == stamp_) continue;
      rim.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], n});
    }
  }
  for (int t : cav) {
    tris_[t].alive = false;
    free_.push_back(t);
  }

  created_.clear();
  std::unordered_map<int, int> first;
  first.reserve(rim.size() * 2);
  for (const Rim& r : rim) {
    const int nt = new_triangle();
    DTri& tr = tris_[nt];
    tr.v = {r.a, r.b, vid};
    tr.nb = {-1, -1, r.outside};
    tr.alive = true;
    if (r.outside >= 0) {
      DTri& o = tris_[r.outside];
      for (int j = 0; j < 3; ++j)
        if (o.v[j] != r.a && o.v[j] != r.b) o.nb[j] = nt;
    }
    first[r.a] = nt;
    vert_tri_[r.a] = nt;
    vert_tri_[r.b] = nt;
    created_.push_back(nt);
  }
  for (int nt : created_) {
    const int b = tris_[nt].v[1];
    const int other = first.at(b);
    tris_[nt].nb[0] = other;
    tris_[other].nb[1] = nt;
  }
  vert_tri_[vid] = created_.front();
  mark_.resize(tris_.size(), 0);
  return vid;
}

std::vector<int> Delaunay::star(int a) const {
  mark_.resize(tris_.size(), 0);
  ++stamp_;
  std::vector<int> result{vert_tri_[a]};
  mark_[result[0]] = stamp_;
  for (std::size_t k = 0; k < result.size(); ++k) {
    const DTri& tr = tris_[result[k]];
    for (int i = 0; i < 3; ++i) {
      if (tr.v[i] == a) continue;  // the edge opposite a does not touch a
      const int n = tr.nb[i];
      if (n < 0 || mark_[n] == stamp_) continue;
      mark_[n] = stamp_;
      result.push_back(n);
    }
  }
  return result;
}

int Delaunay::find_edge(int a, int b) const {
  for (int t : star(a)) {
    const auto& v = tris_[t].v;
    if (v[0] == b || v[1] == b || v[2] == b) return t;
  }
  return -1;
}

}  // namespace nlfem::detail
