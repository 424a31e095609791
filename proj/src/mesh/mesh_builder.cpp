// Conforming Delaunay refinement of the geometry's planar straight line graph
// inside a far-field disk. Subsegments are kept Gabriel (empty diametral
// circle) so they appear as mesh edges; bad triangles are removed by
// inserting circumcenters, or by splitting the subsegments the circumcenter
// would encroach upon.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numbers>

#include "delaunay.hpp"
#include "nlfem/mesh.hpp"

namespace nlfem {

namespace {

using detail::Delaunay;
using detail::DTri;
using detail::orient2d;

enum class SegKind { Boundary, Interface, Outer };

struct SegInfo {
  SegKind kind = SegKind::Boundary;
  bool arc = false;
  Point center;
  double radius = 0.0;
  double ta = 0.0;  // angle at the smaller vertex index
  double tb = 0.0;
};

using SizeFn = std::function<double(Point)>;

class Refiner {
 public:
  Refiner(double far_radius, SizeFn size, const MeshOptions& opts)
      : dt_(Point{0.0, 0.0}, far_radius), size_(std::move(size)), opts_(opts) {}

  void add_straight(Point a, Point b, SegKind kind, double max_edge) {
    std::vector<double> ts{0.0, 1.0};
    subdivide(ts, [&](double t) { return a + t * (b - a); }, max_edge);
    std::vector<int> ids;
    for (double t : ts) ids.push_back(dt_.insert(t == 1.0 ? b : a + t * (b - a)));
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      SegInfo info;
      info.kind = kind;
      register_segment(ids[i], ids[i + 1], info, 0.0, 0.0);
    }
  }

  void add_arc(Point c, double r, double ta, double tb, Point pa, Point pb, SegKind kind, double max_edge,
               int min_pieces) {
    std::vector<double> ts;
    for (int i = 0; i <= min_pieces; ++i) ts.push_back(ta + (tb - ta) * i / min_pieces);
    auto at = [&](double t) { return Point{c.x + r * std::cos(t), c.y + r * std::sin(t)}; };
    subdivide(ts, at, max_edge);
    std::vector<int> ids;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Point p = i == 0 ? pa : (i + 1 == ts.size() ? pb : at(ts[i]));
      ids.push_back(dt_.insert(p));
    }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      SegInfo info;
      info.kind = kind;
      info.arc = true;
      info.center = c;
      info.radius = r;
      register_segment(ids[i], ids[i + 1], info, ts[i], ts[i + 1]);
    }
  }

  void refine() {
    for (const auto& [e, info] : segs_) seg_queue_.push_back(e);
    const auto& tris = dt_.triangles();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      if (tris[t].alive) tri_queue_.push_back({t, tris[t].v});
    while (true) {
      fix_segments();
      if (tri_queue_.empty()) break;
      const auto [t, verts] = tri_queue_.front();
      tri_queue_.pop_front();
      const DTri& tr = dt_.triangles()[t];
      if (!tr.alive || tr.v != verts) continue;
      if (!is_bad(t)) continue;
      split_triangle(t);
      if (static_cast<int>(dt_.points().size()) > opts_.max_vertices)
        throw MeshError("mesh refinement exceeded the vertex limit of " + std::to_string(opts_.max_vertices));
    }
  }

  const Delaunay& triangulation() const { return dt_; }
  bool is_segment(int a, int b) const { return segs_.count(make_edge(a, b)) > 0; }

 private:
  struct QueuedTri {
    int t;
    std::array<int, 3> v;
  };

  void subdivide(std::vector<double>& ts, const std::function<Point(double)>& at, double max_edge) {
    // Bisect until every piece respects the size field (and the optional cap).
    std::vector<double> out{ts.front()};
    std::function<void(double, double)> rec = [&](double t0, double t1) {
      const Point p0 = at(t0), p1 = at(t1), pm = at(0.5 * (t0 + t1));
      double target = opts_.size_factor * std::min({size_(p0), size_(p1), size_(pm)});
      if (max_edge > 0.0) target = std::min(target, max_edge);
      if (distance(p0, p1) > target) {
        rec(t0, 0.5 * (t0 + t1));
        rec(0.5 * (t0 + t1), t1);
      } else {
        out.push_back(t1);
      }
    };
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) rec(ts[i], ts[i + 1]);
    ts = std::move(out);
  }

  void register_segment(int a, int b, SegInfo info, double ta, double tb) {
    if (a == b) throw MeshError("degenerate boundary segment");
    if (a < b) {
      info.ta = ta;
      info.tb = tb;
    } else {
      info.ta = tb;
      info.tb = ta;
    }
    segs_[make_edge(a, b)] = info;
  }

  Point point(int v) const { return dt_.points()[v]; }

  bool encroached(const Edge& e) const {
    const int t = dt_.find_edge(e[0], e[1]);
    if (t < 0) return true;
    const Point a = point(e[0]), b = point(e[1]);
    const DTri& tr = dt_.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int v = tr.v[i];
      if (v == e[0] || v == e[1]) continue;
      if (!Delaunay::is_super(v) && dot(point(v) - a, point(v) - b) < 0.0) return true;
      const int n = tr.nb[i];
      if (n < 0) continue;
      for (int w : dt_.triangles()[n].v) {
        if (w == e[0] || w == e[1] || Delaunay::is_super(w)) continue;
        if (dot(point(w) - a, point(w) - b) < 0.0) return true;
      }
    }
    return false;
  }

  void fix_segments() {
    while (!seg_queue_.empty()) {
      const Edge e = seg_queue_.front();
      seg_queue_.pop_front();
      if (!segs_.count(e)) continue;
      if (encroached(e)) split_segment(e);
    }
  }

  void after_insert(const std::vector<Edge>& removed) {
    for (const Edge& e : removed)
      if (segs_.count(e)) seg_queue_.push_back(e);
    for (int t : dt_.last_created()) tri_queue_.push_back({t, dt_.triangles()[t].v});
  }

  void split_segment(const Edge& e) {
    const SegInfo info = segs_.at(e);
    const Point a = point(e[0]), b = point(e[1]);
    Point m;
    double tm = 0.0;
    if (info.arc) {
      tm = 0.5 * (info.ta + info.tb);
      m = {info.center.x + info.radius * std::cos(tm), info.center.y + info.radius * std::sin(tm)};
    } else {
      m = 0.5 * (a + b);
    }
    segs_.erase(e);
    std::vector<Edge> removed;
    const int hint = dt_.any_triangle_of(e[0]);
    const int before = static_cast<int>(dt_.points().size());
    const int vm = dt_.insert(m, hint, &removed);
    if (vm < before) throw MeshError("segment split produced a duplicate vertex");
    SegInfo left = info, right = info;
    register_segment(e[0], vm, left, info.ta, tm);
    register_segment(vm, e[1], right, tm, info.tb);
    seg_queue_.push_back(make_edge(e[0], vm));
    seg_queue_.push_back(make_edge(vm, e[1]));
    after_insert(removed);
  }

  bool touches_super(const DTri& tr) const {
    return Delaunay::is_super(tr.v[0]) || Delaunay::is_super(tr.v[1]) || Delaunay::is_super(tr.v[2]);
  }

  bool is_bad(int t) const {
    const DTri& tr = dt_.triangles()[t];
    if (touches_super(tr)) return false;
    const Point a = point(tr.v[0]), b = point(tr.v[1]), c = point(tr.v[2]);
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double lmin = std::min({la, lb, lc}), lmax = std::max({la, lb, lc});
    const double area2 = orient2d(a, b, c);
    const double circumradius = la * lb * lc / (2.0 * area2);
    if (circumradius > opts_.max_radius_edge * lmin) return true;
    const Point g = (1.0 / 3.0) * (a + b + c);
    const double target = std::min({size_(g), size_(a), size_(b), size_(c)});
    return lmax > opts_.size_factor * target;
  }

  void split_triangle(int t) {
    const DTri tr = dt_.triangles()[t];
    const Point c = detail::circumcenter(point(tr.v[0]), point(tr.v[1]), point(tr.v[2]));
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw MeshError("degenerate triangle during refinement");

    // Walk toward the circumcenter; leaving the far disk means an outer
    // subsegment is in the way, which is split instead.
    int cur = t;
    for (std::size_t step = 0;; ++step) {
      if (step > 4 * dt_.triangles().size() + 100) throw MeshError("circumcenter walk did not terminate");
      const DTri& ct = dt_.triangles()[cur];
      int next = -1;
      for (int i = 0; i < 3 && next < 0; ++i) {
        const int a = ct.v[(i + 1) % 3], b = ct.v[(i + 2) % 3];
        if (orient2d(point(a), point(b), c) < 0.0) {
          const auto it = segs_.find(make_edge(a, b));
          if (it != segs_.end() && it->second.kind == SegKind::Outer) {
            split_segment(make_edge(a, b));
            tri_queue_.push_back({t, tr.v});
            return;
          }
          next = ct.nb[i];
          if (next < 0) throw MeshError("circumcenter left the triangulation");
        }
      }
      if (next < 0) break;
      cur = next;
    }
    for (int v : dt_.triangles()[cur].v)
      if (point(v) == c) return;

    const std::vector<int> cav = dt_.cavity(c, cur);
    std::vector<Edge> hits;
    for (int ct : cav) {
      const auto& v = dt_.triangles()[ct].v;
      for (int i = 0; i < 3; ++i) {
        const Edge e = make_edge(v[i], v[(i + 1) % 3]);
        if (!segs_.count(e)) continue;
        if (dot(c - point(e[0]), c - point(e[1])) < 0.0) hits.push_back(e);
      }
    }
    if (!hits.empty()) {
      std::sort(hits.begin(), hits.end());
      hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
      for (const Edge& e : hits)
        if (segs_.count(e)) split_segment(e);
      tri_queue_.push_back({t, tr.v});
      return;
    }
    std::vector<Edge> removed;
    dt_.insert_with_cavity(c, cav, &removed);
    after_insert(removed);
  }

  Delaunay dt_;
  SizeFn size_;
  MeshOptions opts_;
  std::map<Edge, SegInfo> segs_;
  std::deque<Edge> seg_queue_;
  std::deque<QueuedTri> tri_queue_;
};

double target_distance(const GeometrySpec& spec, const GradingSpec& g, Point x) {
  switch (g.target) {
    case GradingTarget::Interface: return spec.distance_to_interface(x);
    case GradingTarget::Point: return distance(x, g.point);
    case GradingTarget::Boundary: return spec.distance_to_boundary(x);
  }
  return 0.0;
}

Mesh generate(const GeometrySpec& spec, double h, const GradingSpec& grading, const MeshOptions& opts) {
  spec.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw GeometryError("mesh size h must be positive");
  if (!(grading.mu >= 1.0) || !std::isfinite(grading.mu)) throw GeometryError("grading exponent mu must be >= 1");
  if (grading.mu > 1.0 && grading.target == GradingTarget::Interface && !spec.has_interface())
    throw GeometryError("grading toward the interface requested but " + to_string(spec.kind) + " has none");

  const double r_dom = spec.bounding_radius();
  const double r_far = opts.far_radius > 0.0 ? opts.far_radius : opts.far_radius_factor * r_dom;
  if (!(r_far > r_dom)) throw GeometryError("far-field radius must exceed the domain's bounding radius");

  const double mu = grading.mu;
  const double ext_cap = std::max(h, 0.25 * r_far);
  SizeFn size = [&spec, &grading, h, mu, opts, ext_cap](Point x) {
    const double law = mu == 1.0 ? h : graded_size(h, mu, target_distance(spec, grading, x));
    const double d = spec.distance_to_domain(x);
    if (d <= 0.0) return law;
    return std::min(ext_cap, law + opts.exterior_growth * d);
  };

  Refiner ref(r_far, size, opts);
  for (const BoundaryPiece& p : spec.pieces()) {
    const SegKind kind = p.kind == SegmentKind::Interface ? SegKind::Interface : SegKind::Boundary;
    const double cap = kind == SegKind::Boundary ? opts.boundary_max_edge : 0.0;
    if (p.is_arc)
      ref.add_arc(p.center, p.radius, p.angle_a, p.angle_b, p.a, p.b, kind, cap, 2);
    else
      ref.add_straight(p.a, p.b, kind, cap);
  }
  const std::array<Point, 5> axis{Point{r_far, 0.0}, Point{0.0, r_far}, Point{-r_far, 0.0}, Point{0.0, -r_far},
                                  Point{r_far, 0.0}};
  for (int q = 0; q < 4; ++q)
    ref.add_arc({0.0, 0.0}, r_far, q * std::numbers::pi / 2, (q + 1) * std::numbers::pi / 2, axis[q], axis[q + 1],
                SegKind::Outer, 0.0, 4);
  ref.refine();

  // Flood fill regions bounded by subsegments, then tag each region by an
  // area-weighted vote of the geometry's barycenter rule.
  const Delaunay& dt = ref.triangulation();
  const auto& tris = dt.triangles();
  const auto& pts = dt.points();
  const int nt = static_cast<int>(tris.size());
  std::vector<int> region(nt, -1);
  std::vector<std::map<int, double>> votes;
  auto usable = [&](int t) {
    const DTri& tr = tris[t];
    return tr.alive && !Delaunay::is_super(tr.v[0]) && !Delaunay::is_super(tr.v[1]) && !Delaunay::is_super(tr.v[2]);
  };
  int nregions = 0;
  for (int seed = 0; seed < nt; ++seed) {
    if (!usable(seed) || region[seed] >= 0) continue;
    votes.emplace_back();
    std::vector<int> stack{seed};
    region[seed] = nregions;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const DTri& tr = tris[t];
      const Point a = pts[tr.v[0]], b = pts[tr.v[1]], c = pts[tr.v[2]];
      const Point g = (1.0 / 3.0) * (a + b + c);
      votes.back()[static_cast<int>(spec.classify(g))] += 0.5 * orient2d(a, b, c);
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || !usable(n) || region[n] >= 0) continue;
        if (ref.is_segment(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
        region[n] = nregions;
        stack.push_back(n);
      }
    }
    ++nregions;
  }
  std::vector<Subdomain> region_tag(nregions);
  for (int r = 0; r < nregions; ++r) {
    const auto best = std::max_element(votes[r].begin(), votes[r].end(),
                                       [](const auto& x, const auto& y) { return x.second < y.second; });
    region_tag[r] = static_cast<Subdomain>(best->first);
  }

  Mesh mesh;
  mesh.geometry = spec;
  mesh.far_radius = opts.auxiliary ? r_far : 0.0;
  std::vector<int> node_map(pts.size(), -1);
  std::vector<Triangle> dom, aux;
  for (int t = 0; t < nt; ++t) {
    if (!usable(t)) continue;
    const Subdomain tag = region_tag[region[t]];
    const Triangle tri{tris[t].v[0], tris[t].v[1], tris[t].v[2]};
    if (tag == Subdomain::Exterior) {
      if (opts.auxiliary) aux.push_back(tri);
    } else {
      dom.push_back(tri);
      mesh.tags.push_back(tag);
    }
  }
  mesh.tags.resize(dom.size() + aux.size(), Subdomain::Exterior);
  mesh.triangles = dom;
  mesh.triangles.insert(mesh.triangles.end(), aux.begin(), aux.end());
  for (auto& tr : mesh.triangles)
    for (int& v : tr) {
      if (node_map[v] < 0) {
        node_map[v] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(pts[v]);
      }
      v = node_map[v];
    }
  mesh.finalize_topology();
  return mesh;
}

}  // namespace

double graded_size(double h, double mu, double d) {
  if (mu == 1.0) return h;
  return std::min(h, h * std::pow(std::max(d, std::pow(h, mu)), (mu - 1.0) / mu));
}

Mesh build_mesh(const GeometrySpec& spec, double h, const MeshOptions& opts) {
  return generate(spec, h, GradingSpec{}, opts);
}

Mesh grade_mesh(const GeometrySpec& spec, double h, const GradingSpec& grading, const MeshOptions& opts) {
  return generate(spec, h, grading, opts);
}

}  // namespace nlfem
