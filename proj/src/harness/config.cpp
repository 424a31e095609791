#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nlfem/harness.hpp"

namespace nlfem::harness {

using nlohmann::json;

namespace {

const std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::InterfaceSweep, "interface_sweep"}, {Experiment::Isolated, "isolated"},
    {Experiment::Singularity, "singularity"},        {Experiment::Eigensweep, "eigensweep"},
    {Experiment::EnergyCompare, "energy_compare"},   {Experiment::Convergence, "convergence"},
    {Experiment::Custom, "custom"}};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

Point point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Box box(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) fail(where, "expected [x0, x1, y0, y1]");
  return {number(j[0], where), number(j[1], where), number(j[2], where), number(j[3], where)};
}

Subdomain tag(const json& j, const std::string& where) {
  if (j == "OMEGA1") return Subdomain::Omega1;
  if (j == "OMEGA2") return Subdomain::Omega2;
  fail(where, "expected \"OMEGA1\" or \"OMEGA2\"");
}

GeometrySpec geometry(const json& j) {
  const std::string w = "geometry";
  check_keys(j, w, {"kind", "box", "box2", "center", "radius", "outer_radius", "half_width", "split", "tag"});
  if (!j.contains("kind") || !j["kind"].is_string()) fail(w, "missing string 'kind'");
  GeometrySpec g;
  try {
    g.kind = geometry_kind_from_string(j["kind"].get<std::string>());
  } catch (const GeometryError& e) {
    fail(w, e.what());
  }
  if (j.contains("box")) g.box = box(j["box"], w + ".box");
  if (j.contains("box2")) g.box2 = box(j["box2"], w + ".box2");
  if (j.contains("center")) g.center = point(j["center"], w + ".center");
  g.radius = number_or(j, "radius", g.radius, w);
  g.outer_radius = number_or(j, "outer_radius", g.outer_radius, w);
  g.half_width = number_or(j, "half_width", g.half_width, w);
  g.split = number_or(j, "split", g.split, w);
  if (j.contains("tag")) g.whole_tag = tag(j["tag"], w + ".tag");
  if (g.kind == GeometryKind::TwoRects && !j.contains("box2")) fail(w, "TWO_RECTS needs box2");
  try {
    g.validate();
  } catch (const GeometryError& e) {
    fail(w, e.what());
  }
  return g;
}

json geometry_json(const GeometrySpec& g) {
  json j;
  j["kind"] = to_string(g.kind);
  auto bx = [](const Box& b) { return json::array({b.x0, b.x1, b.y0, b.y1}); };
  switch (g.kind) {
    case GeometryKind::Rect:
      j["box"] = bx(g.box);
      j["tag"] = to_string(g.whole_tag);
      break;
    case GeometryKind::Disk:
      j["center"] = {g.center.x, g.center.y};
      j["radius"] = g.radius;
      j["tag"] = to_string(g.whole_tag);
      break;
    case GeometryKind::AnnularSplitDisk:
      j["center"] = {g.center.x, g.center.y};
      j["radius"] = g.radius;
      j["outer_radius"] = g.outer_radius;
      break;
    case GeometryKind::LShapeSplit: j["half_width"] = g.half_width; break;
    case GeometryKind::TwoRects:
      j["box"] = bx(g.box);
      j["box2"] = bx(g.box2);
      break;
    case GeometryKind::SquareSplit:
      j["box"] = bx(g.box);
      j["split"] = g.split;
      break;
  }
  return j;
}

Range range(const json& j, const std::string& where) {
  check_keys(j, where, {"from", "to", "step"});
  for (const char* k : {"from", "to", "step"})
    if (!j.contains(k)) fail(where, std::string("missing '") + k + "'");
  Range r{number(j["from"], where), number(j["to"], where), number(j["step"], where)};
  if (!(r.step > 0.0) || r.to < r.from) fail(where, "need step > 0 and to >= from");
  if ((r.to - r.from) / r.step > 1e6) fail(where, "more than a million values");
  return r;
}

std::vector<double> s_list(const json& j) {
  std::vector<double> s;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) s.push_back(number(j[i], "s[" + std::to_string(i) + "]"));
  } else if (j.is_number()) {
    s.push_back(number(j, "s"));
  } else if (j.is_object()) {
    s = range(j, "s").values();
  } else {
    fail("s", "expected a number, a list or {from, to, step}");
  }
  if (s.empty()) fail("s", "no values");
  for (double v : s)
    if (!(v > 0.0 && v < 1.0)) fail("s", "every value must lie in (0, 1)");
  return s;
}

std::optional<GradingTarget> target(const json& j) {
  if (j == "none") return std::nullopt;
  if (j == "interface") return GradingTarget::Interface;
  if (j == "point") return GradingTarget::Point;
  if (j == "boundary") return GradingTarget::Boundary;
  fail("mesh.target", "expected none, interface, point or boundary");
}

const char* target_name(const std::optional<GradingTarget>& t) {
  if (!t) return "none";
  switch (*t) {
    case GradingTarget::Interface: return "interface";
    case GradingTarget::Point: return "point";
    case GradingTarget::Boundary: return "boundary";
  }
  return "none";
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, n] : kExperimentNames)
    if (k == e) return n;
  return "?";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kExperimentNames)
    if (name == n) return k;
  throw ConfigError("unknown experiment '" + name +
                    "' (expected interface_sweep, isolated, singularity, eigensweep, energy_compare, convergence "
                    "or custom)");
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  const long n = std::lround(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(std::round((from + i * step) * 1e12) / 1e12);
  return out;
}

std::string config_hash(const json& canonical) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"name", "experiment", "geometry", "energy", "s", "mesh", "ladder", "rhs", "sigma_l", "sigma_nl",
              "quadrature", "probe", "slices", "omega2", "peak_factor", "reference", "write_solution", "slow",
              "output", "workers", "deterministic", "description"});
  ExperimentConfig c;
  if (!j.contains("experiment") || !j["experiment"].is_string()) fail("config", "missing string 'experiment'");
  c.experiment = experiment_from_string(j["experiment"].get<std::string>());
  c.name = j.value("name", to_string(c.experiment));
  if (!j.contains("geometry")) fail("config", "missing 'geometry'");
  c.geometry = geometry(j["geometry"]);
  if (j.contains("energy")) {
    if (!j["energy"].is_string()) fail("energy", "expected \"E_I\" or \"E_II\"");
    try {
      c.energy = energy_from_string(j["energy"].get<std::string>());
    } catch (const std::exception& e) {
      fail("energy", e.what());
    }
  }
  if (!j.contains("s")) fail("config", "missing 's'");
  c.s_values = s_list(j["s"]);

  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    check_keys(m, "mesh", {"h", "mu", "target", "point", "auxiliary", "far_radius_factor"});
    c.mesh.h = number_or(m, "h", c.mesh.h, "mesh");
    c.mesh.mu = number_or(m, "mu", c.mesh.mu, "mesh");
    if (m.contains("target")) c.mesh.target = target(m["target"]);
    if (m.contains("point")) c.mesh.point = point(m["point"], "mesh.point");
    if (m.contains("auxiliary")) {
      if (!m["auxiliary"].is_boolean()) fail("mesh.auxiliary", "expected a boolean");
      c.mesh.auxiliary = m["auxiliary"].get<bool>();
    }
    c.mesh.far_radius_factor = number_or(m, "far_radius_factor", c.mesh.far_radius_factor, "mesh");
  }
  if (!(c.mesh.h > 0.0)) fail("mesh.h", "must be positive");
  if (!(c.mesh.mu >= 1.0)) fail("mesh.mu", "must be at least 1");
  if (c.mesh.mu > 1.0 && !c.mesh.target) fail("mesh", "graded mesh (mu > 1) needs a target");
  if (!(c.mesh.far_radius_factor > 1.0)) fail("mesh.far_radius_factor", "must exceed 1");
  if (c.energy == EnergyKind::EII && !c.mesh.auxiliary) c.mesh.auxiliary = true;

  if (j.contains("ladder")) {
    if (!j["ladder"].is_array()) fail("ladder", "expected a list of mesh sizes");
    for (const auto& v : j["ladder"]) c.ladder.push_back(number(v, "ladder"));
    for (double h : c.ladder)
      if (!(h > 0.0)) fail("ladder", "mesh sizes must be positive");
  }
  if (c.experiment == Experiment::Convergence && c.ladder.size() < 3)
    fail("ladder", "a convergence study needs at least 3 levels");

  if (j.contains("rhs")) {
    c.rhs.clear();
    const json& r = j["rhs"];
    auto one = [&](const json& v) {
      if (v.is_number()) {
        c.rhs.push_back(format_double(number(v, "rhs")));
      } else if (v.is_string()) {
        c.rhs.push_back(v.get<std::string>());
      } else {
        fail("rhs", "expected a name or a number");
      }
    };
    if (r.is_array()) {
      for (const auto& v : r) one(v);
    } else {
      one(r);
    }
    if (c.rhs.empty()) fail("rhs", "no right-hand side");
    for (const auto& name : c.rhs) {
      try {
        rhs_field(name, c.geometry);
      } catch (const std::invalid_argument& e) {
        fail("rhs", e.what());
      }
    }
  }
  c.sigma_l = number_or(j, "sigma_l", 1.0, "config");
  c.sigma_nl = number_or(j, "sigma_nl", 1.0, "config");
  if (!(c.sigma_l > 0.0) || !(c.sigma_nl > 0.0)) fail("sigma", "diffusivities must be positive");

  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    check_keys(q, "quadrature",
               {"touching_order", "near_degree", "far_degree", "near_distance", "split_distance", "max_split_depth"});
    auto integer = [&](const char* k, int fallback) {
      if (!q.contains(k)) return fallback;
      if (!q[k].is_number_integer()) fail(std::string("quadrature.") + k, "expected an integer");
      return q[k].get<int>();
    };
    c.quad.touching_order = integer("touching_order", c.quad.touching_order);
    c.quad.near_degree = integer("near_degree", c.quad.near_degree);
    c.quad.far_degree = integer("far_degree", c.quad.far_degree);
    c.quad.max_split_depth = integer("max_split_depth", c.quad.max_split_depth);
    c.quad.near_distance = number_or(q, "near_distance", c.quad.near_distance, "quadrature");
    c.quad.split_distance = number_or(q, "split_distance", c.quad.split_distance, "quadrature");
    if (c.quad.touching_order < 1 || c.quad.touching_order > 64) fail("quadrature.touching_order", "must lie in [1, 64]");
    if (c.quad.near_degree < 1 || c.quad.far_degree < 1) fail("quadrature", "degrees must be positive");
  }
  if (j.contains("probe")) c.probe = point(j["probe"], "probe");
  if (j.contains("slices")) {
    if (!j["slices"].is_array()) fail("slices", "expected a list");
    for (const auto& sj : j["slices"]) {
      check_keys(sj, "slices[]", {"name", "from", "to", "samples"});
      SliceSpec sl;
      sl.name = sj.value("name", "slice" + std::to_string(c.slices.size()));
      if (!sj.contains("from") || !sj.contains("to")) fail("slices[]", "needs 'from' and 'to'");
      sl.from = point(sj["from"], "slices[].from");
      sl.to = point(sj["to"], "slices[].to");
      sl.samples = sj.value("samples", 11);
      if (sl.samples < 3) fail("slices[].samples", "need at least 3");
      c.slices.push_back(sl);
    }
  }
  if (j.contains("omega2")) c.omega2 = range(j["omega2"], "omega2");
  if (c.experiment == Experiment::Eigensweep && c.omega2.step == 0.0) fail("omega2", "eigensweep needs an omega2 range");
  c.peak_factor = number_or(j, "peak_factor", c.peak_factor, "config");
  if (j.contains("reference")) {
    c.reference = j["reference"].get<std::string>();
    if (c.reference != "ball_exact" && c.reference != "local_sine")
      fail("reference", "expected ball_exact or local_sine");
  }
  if (c.experiment == Experiment::Convergence && c.reference == "ball_exact" &&
      !(c.geometry.kind == GeometryKind::Disk && c.geometry.whole_tag == Subdomain::Omega2))
    fail("reference", "ball_exact needs a DISK geometry tagged OMEGA2");
  if (c.experiment == Experiment::Convergence && c.reference == "local_sine" &&
      !(c.geometry.kind == GeometryKind::Rect && c.geometry.whole_tag == Subdomain::Omega1))
    fail("reference", "local_sine needs a RECT geometry tagged OMEGA1");
  c.write_solution = j.value("write_solution", false);
  c.slow = j.value("slow", false);
  if (j.contains("output")) {
    const json& o = j["output"];
    if (o.is_string()) {
      c.out_dir = o.get<std::string>();
    } else {
      check_keys(o, "output", {"dir"});
      c.out_dir = o.value("dir", c.out_dir);
    }
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 0)
      fail("workers", "expected a nonnegative integer (0: all threads)");
    c.workers = j["workers"].get<int>();
  }
  if (j.contains("deterministic") && !j.value("deterministic", true))
    fail("deterministic", "only deterministic runs are supported");

  json& k = c.canonical;
  k["name"] = c.name;
  k["experiment"] = to_string(c.experiment);
  k["geometry"] = geometry_json(c.geometry);
  k["energy"] = to_string(c.energy);
  k["s"] = c.s_values;
  k["mesh"] = {{"h", c.mesh.h},
               {"mu", c.mesh.mu},
               {"target", target_name(c.mesh.target)},
               {"point", {c.mesh.point.x, c.mesh.point.y}},
               {"auxiliary", c.mesh.auxiliary},
               {"far_radius_factor", c.mesh.far_radius_factor}};
  k["ladder"] = c.ladder;
  k["rhs"] = c.rhs;
  k["sigma_l"] = c.sigma_l;
  k["sigma_nl"] = c.sigma_nl;
  k["quadrature"] = {{"touching_order", c.quad.touching_order}, {"near_degree", c.quad.near_degree},
                     {"far_degree", c.quad.far_degree},         {"near_distance", c.quad.near_distance},
                     {"split_distance", c.quad.split_distance}, {"max_split_depth", c.quad.max_split_depth}};
  k["probe"] = {c.probe.x, c.probe.y};
  k["slices"] = json::array();
  for (const auto& sl : c.slices)
    k["slices"].push_back(
        {{"name", sl.name}, {"from", {sl.from.x, sl.from.y}}, {"to", {sl.to.x, sl.to.y}}, {"samples", sl.samples}});
  k["omega2"] = {{"from", c.omega2.from}, {"to", c.omega2.to}, {"step", c.omega2.step}};
  k["peak_factor"] = c.peak_factor;
  k["reference"] = c.reference;
  k["write_solution"] = c.write_solution;
  c.hash = config_hash(k);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace nlfem::harness
