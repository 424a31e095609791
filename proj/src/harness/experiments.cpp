#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "nlfem/constants.hpp"
#include "nlfem/harness.hpp"
#include "nlfem/postprocess.hpp"
#include "nlfem/solver.hpp"

namespace nlfem::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs f, converting module exceptions into a RunError naming the stage.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const RunError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunError(name, e.what());
  }
}

// Independent jobs on up to `workers` threads; the first failure (in job
// order) is rethrown after all jobs finish.
template <class F>
void parallel_jobs(int n, int workers, F&& job) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, std::min(workers, n)))
  for (int i = 0; i < n; ++i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Short form for report keys; the CSV files carry the full digits.
std::string key_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

struct Context {
  const ExperimentConfig& cfg;
  ExperimentReport& report;
  /// Threads for the whole run (0 in the config: all available).
  int workers() const { return cfg.workers > 0 ? cfg.workers : omp_get_max_threads(); }
  /// Assembly threads inside one of n concurrent jobs.
  int assembly_workers(int n) const { return std::min(workers(), n) > 1 ? 1 : workers(); }
};

Mesh make_mesh(const ExperimentConfig& cfg, const GeometrySpec& g, double h, bool auxiliary) {
  MeshOptions mo;
  mo.auxiliary = auxiliary;
  mo.far_radius_factor = cfg.mesh.far_radius_factor;
  if (cfg.mesh.mu > 1.0) {
    GradingSpec gs;
    gs.mu = cfg.mesh.mu;
    gs.target = *cfg.mesh.target;
    gs.point = cfg.mesh.point;
    return grade_mesh(g, h, gs, mo);
  }
  return build_mesh(g, h, mo);
}

MeshStats stats_of(const Mesh& m, const std::string& label) {
  MeshStats st;
  st.label = label;
  st.omega1 = m.count(Subdomain::Omega1);
  st.omega2 = m.count(Subdomain::Omega2);
  st.exterior = m.count(Subdomain::Exterior);
  st.nodes = m.num_nodes();
  st.h_max = m.h_max;
  st.h_min = 1e300;
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.tags[t] != Subdomain::Exterior) st.h_min = std::min(st.h_min, m.diameter(t));
  st.shape_regularity = shape_regularity(m);
  return st;
}

Mesh context_mesh(Context& ctx, const GeometrySpec& g, double h, const std::string& label) {
  const auto t0 = Clock::now();
  Mesh m = stage("mesh", [&] {
    Mesh out = make_mesh(ctx.cfg, g, h, ctx.cfg.mesh.auxiliary);
    const auto rep = check_mesh(out);
    if (!rep.ok) throw MeshError("mesh audit failed: " + rep.message);
    return out;
  });
  ctx.report.wall_seconds["mesh_" + label] = seconds_since(t0);
  ctx.report.meshes.push_back(stats_of(m, label));
  return m;
}

ProblemSpec problem(const ExperimentConfig& cfg, const GeometrySpec& g, EnergyKind e, double s, const std::string& rhs) {
  ProblemSpec ps;
  ps.energy = e;
  ps.s = s;
  ps.geometry = g;
  const double sl = cfg.sigma_l;
  ps.sigma_l = [sl](Point) { return sl; };
  ps.sigma_nl = KernelWeight::constant(cfg.sigma_nl);
  ps.f = rhs_field(rhs, g);
  ps.quad = cfg.quad;
  return ps;
}

// What survives of one run; the dense system itself is dropped as soon as
// possible since sweeps may hold many runs.
struct Solved {
  Solution solution;
  int dofs = 0;
  double b_dot_u = 0.0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

using Inspect = std::function<void(const LinearSystem&, const Solution&)>;

Solved assemble_and_solve(int assembly_workers, const ProblemSpec& ps, const Mesh& mesh, const Inspect& inspect = {}) {
  const auto t0 = Clock::now();
  Solved out;
  BuildOptions bo;
  bo.assembly.workers = assembly_workers;
  const LinearSystem system = stage("assembly", [&] { return build_system(ps, mesh, bo); });
  out.solution = stage("solver", [&] { return solve(system, mesh); });
  out.dofs = system.size();
  for (int i = 0; i < system.size(); ++i) out.b_dot_u += system.b[i] * out.solution.values[system.dofs.row_to_node[i]];
  out.warnings = system.warnings;
  out.warnings.insert(out.warnings.end(), out.solution.info.warnings.begin(), out.solution.info.warnings.end());
  if (inspect) stage("postprocess", [&] { inspect(system, out.solution); return 0; });
  out.seconds = seconds_since(t0);
  return out;
}

std::string run_label(const std::string& rhs, EnergyKind e, double s) {
  return rhs + "_" + std::string(to_string(e)) + "_s" + fixed_tag(s);
}

void add_warnings(ExperimentReport& report, const std::string& label, const Solved& r) {
  for (const auto& w : r.warnings) report.warnings.push_back(label + ": " + w);
}

// Node membership by the tags of the triangles around it.
std::vector<int> node_membership(const Mesh& m, Subdomain tag) {
  std::vector<char> mark(m.num_nodes(), 0);
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.tags[t] == tag)
      for (int v : m.triangles[t]) mark[v] = 1;
  std::vector<int> out;
  for (int v = 0; v < m.num_nodes(); ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

double max_abs_on(const Solution& sol, const std::vector<int>& nodes, const std::vector<char>* exclude = nullptr) {
  double m = 0.0;
  for (int v : nodes)
    if (!exclude || !(*exclude)[v]) m = std::max(m, std::abs(sol.values[v]));
  return m;
}

Table slice_table() { return {"slices", {"slice [-]", "run [-]", "s [1]", "t [length]", "u [1]"}, {}}; }

void add_slices(const ExperimentConfig& cfg, const Solution& sol, const std::string& label, double s, Table& table,
                std::map<std::string, Figure>& figs) {
  for (const auto& sl : cfg.slices) {
    const auto samples = stage("postprocess", [&] { return slice(sol, sl.from, sl.to, sl.samples); });
    Series ser{label, {}, {}, true};
    for (const auto& p : samples) {
      table.rows.push_back({sl.name, label, format_double(s), format_double(p.t), format_double(p.value)});
      ser.x.push_back(p.t);
      ser.y.push_back(p.value);
    }
    Figure& f = figs[sl.name];
    f.name = "slice_" + sl.name;
    f.title = "u along " + sl.name;
    f.xlabel = "t";
    f.ylabel = "u";
    f.series.push_back(std::move(ser));
  }
}

void finish_slices(ExperimentReport& report, Table&& table, std::map<std::string, Figure>& figs) {
  if (table.rows.empty()) return;
  report.tables.push_back(std::move(table));
  for (auto& [name, f] : figs) {
    // Keep figures readable: at most eight curves, evenly spaced.
    if (f.series.size() > 8) {
      std::vector<Series> keep;
      for (int k = 0; k < 8; ++k) keep.push_back(f.series[k * (f.series.size() - 1) / 7]);
      f.series = std::move(keep);
    }
    report.figures.push_back(std::move(f));
  }
}

Table nodal_table(const Solution& sol, const Mesh& mesh, const std::string& name) {
  Table t{name, {"node [-]", "x [length]", "y [length]", "subdomain [-]", "u [1]"}, {}};
  std::vector<Subdomain> tag(mesh.num_nodes(), Subdomain::Exterior);
  for (int k = 0; k < mesh.num_triangles(); ++k)
    for (int v : mesh.triangles[k])
      if (mesh.tags[k] != Subdomain::Exterior && tag[v] != Subdomain::Omega1) tag[v] = mesh.tags[k];
  for (int v = 0; v < mesh.num_domain_nodes; ++v)
    t.rows.push_back({std::to_string(v), format_double(mesh.nodes[v].x), format_double(mesh.nodes[v].y),
                      to_string(tag[v]), format_double(sol.values[v])});
  return t;
}

std::string probe_name(Point p) { return "dudn_at_" + fixed_tag(p.x) + "_" + fixed_tag(p.y); }

// ---------------------------------------------------------------------------

void interface_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.geometry.has_interface()) throw ConfigError("interface_sweep needs a geometry with an interface");
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  const int n = static_cast<int>(cfg.s_values.size());
  std::vector<double> dudn(n);
  std::vector<int> dofs(n);
  std::vector<Solved> runs(n);
  parallel_jobs(n, ctx.workers(), [&](int i) {
    runs[i] = assemble_and_solve(ctx.assembly_workers(n), problem(cfg, cfg.geometry, cfg.energy, cfg.s_values[i], cfg.rhs[0]), mesh);
    dudn[i] = stage("postprocess", [&] { return normal_derivative_at(runs[i].solution, mesh, cfg.probe); });
    dofs[i] = runs[i].dofs;
  });
  Table t{"interface_sweep", {"s [1]", probe_name(cfg.probe) + " [1/length]", "dofs [-]", "solver [-]"}, {}};
  Table sl = slice_table();
  std::map<std::string, Figure> figs;
  Figure f{"dudn_vs_s", "normal derivative of u|Omega1 at the probe", "s", "du/dn", false, {}};
  Series ser{std::string("E=") + to_string(cfg.energy), {}, {}, true};
  for (int i = 0; i < n; ++i) {
    const double s = cfg.s_values[i];
    const std::string label = "s=" + key_number(s);
    t.rows.push_back({format_double(s), format_double(dudn[i]), std::to_string(dofs[i]), runs[i].solution.info.method});
    ser.x.push_back(s);
    ser.y.push_back(dudn[i]);
    ctx.report.scalars[probe_name(cfg.probe) + "@s=" + key_number(s)] = dudn[i];
    ctx.report.wall_seconds["solve_s=" + key_number(s)] = runs[i].seconds;
    add_warnings(ctx.report, label, runs[i]);
    add_slices(cfg, runs[i].solution, label, s, sl, figs);
    if (cfg.write_solution) ctx.report.tables.push_back(nodal_table(runs[i].solution, mesh, "solution_s" + fixed_tag(s)));
  }
  f.series.push_back(std::move(ser));
  ctx.report.tables.push_back(std::move(t));
  ctx.report.figures.push_back(std::move(f));
  finish_slices(ctx.report, std::move(sl), figs);
}

void isolated(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  const auto n1 = node_membership(mesh, Subdomain::Omega1);
  const auto n2 = node_membership(mesh, Subdomain::Omega2);
  std::vector<char> on_boundary(mesh.num_nodes(), 0);
  for (int v : mesh.boundary_nodes) on_boundary[v] = 1;

  struct Job {
    std::string rhs;
    double s;
  };
  std::vector<Job> jobs;
  for (const auto& r : cfg.rhs)
    for (double s : cfg.s_values) jobs.push_back({r, s});
  const int n = static_cast<int>(jobs.size());
  std::vector<Solved> runs(n);
  std::vector<double> cross(n);
  parallel_jobs(n, ctx.workers(), [&](int i) {
    auto cross_block = [&](const LinearSystem& sys, const Solution&) {
      std::vector<char> in1(mesh.num_nodes(), 0), in2(mesh.num_nodes(), 0);
      for (int v : n1) in1[v] = 1;
      for (int v : n2) in2[v] = 1;
      double c = 0.0;
      for (int a = 0; a < sys.size(); ++a)
        for (int b = 0; b < sys.size(); ++b) {
          const int va = sys.dofs.row_to_node[a], vb = sys.dofs.row_to_node[b];
          if (in1[va] && !in2[va] && in2[vb] && !in1[vb]) c = std::max(c, std::abs(sys.A(a, b)));
        }
      cross[i] = c;
    };
    runs[i] = assemble_and_solve(ctx.assembly_workers(n),
                                 problem(cfg, cfg.geometry, cfg.energy, jobs[i].s, jobs[i].rhs), mesh, cross_block);
  });
  Table t{"isolated",
          {"rhs [-]", "energy [-]", "s [1]", "max_abs_u_omega1 [1]", "max_abs_u_omega2_interior [1]",
           "ratio_omega2_to_omega1 [1]", "max_abs_cross_block [1]"},
          {}};
  Table sl = slice_table();
  std::map<std::string, Figure> figs;
  for (int i = 0; i < n; ++i) {
    const Solution& sol = runs[i].solution;
    const double m1 = max_abs_on(sol, n1, &on_boundary), m2 = max_abs_on(sol, n2, &on_boundary);
    const double ratio = m1 > 0.0 ? m2 / m1 : std::numeric_limits<double>::infinity();
    const std::string label = run_label(jobs[i].rhs, cfg.energy, jobs[i].s);
    t.rows.push_back({jobs[i].rhs, to_string(cfg.energy), format_double(jobs[i].s), format_double(m1), format_double(m2),
                      format_double(ratio), format_double(cross[i])});
    ctx.report.scalars["ratio_omega2_to_omega1@" + label] = ratio;
    ctx.report.scalars["max_abs_cross_block@" + label] = cross[i];
    ctx.report.wall_seconds["solve_" + label] = runs[i].seconds;
    add_warnings(ctx.report, label, runs[i]);
    add_slices(cfg, sol, label, jobs[i].s, sl, figs);
    if (cfg.write_solution) ctx.report.tables.push_back(nodal_table(sol, mesh, "solution_" + label));
  }
  ctx.report.tables.push_back(std::move(t));
  finish_slices(ctx.report, std::move(sl), figs);
}

void singularity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.slices.empty()) throw ConfigError("singularity needs at least one slice to fit");
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  const int n = static_cast<int>(cfg.s_values.size());
  std::vector<Solved> runs(n);
  std::vector<std::vector<PowerFit>> fits(n);
  parallel_jobs(n, ctx.workers(), [&](int i) {
    runs[i] = assemble_and_solve(ctx.assembly_workers(n), problem(cfg, cfg.geometry, cfg.energy, cfg.s_values[i], cfg.rhs[0]), mesh);
    for (const auto& sl : cfg.slices)
      fits[i].push_back(stage("postprocess", [&] {
        return fit_power(slice(runs[i].solution, sl.from, sl.to, sl.samples));
      }));
  });
  Table t{"singular_exponents", {"s [1]", "slice [-]", "gamma [1]", "C [1]", "log_rms_misfit [1]", "samples [-]"}, {}};
  Table sl = slice_table();
  std::map<std::string, Figure> figs;
  Figure f{"gamma_vs_s", "fitted exponent of u ~ C t^gamma", "s", "gamma", false, {}};
  for (std::size_t k = 0; k < cfg.slices.size(); ++k) f.series.push_back({cfg.slices[k].name, {}, {}, true});
  for (int i = 0; i < n; ++i) {
    const double s = cfg.s_values[i];
    const std::string label = "s=" + key_number(s);
    for (std::size_t k = 0; k < cfg.slices.size(); ++k) {
      const PowerFit& pf = fits[i][k];
      t.rows.push_back({format_double(s), cfg.slices[k].name, format_double(pf.gamma), format_double(pf.C),
                        format_double(pf.residual), std::to_string(pf.samples.size())});
      f.series[k].x.push_back(s);
      f.series[k].y.push_back(pf.gamma);
      ctx.report.scalars["gamma_" + cfg.slices[k].name + "@" + label] = pf.gamma;
    }
    ctx.report.wall_seconds["solve_" + label] = runs[i].seconds;
    add_warnings(ctx.report, label, runs[i]);
    add_slices(cfg, runs[i].solution, label, s, sl, figs);
  }
  ctx.report.tables.push_back(std::move(t));
  ctx.report.figures.push_back(std::move(f));
  finish_slices(ctx.report, std::move(sl), figs);
}

void eigensweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  const std::vector<double> w2 = cfg.omega2.values();
  Table t{"condition_numbers", {"s [1]", "omega2 [1/length^2]", "cond [1]", "singular [-]"}, {}};
  Table p{"peaks", {"s [1]", "rank [-]", "omega2 [1/length^2]", "cond [1]"}, {}};
  Figure f{"condition_vs_omega2", "estimated 2-norm condition number of A - omega^2 M", "omega^2", "cond", true, {}};
  for (double s : cfg.s_values) {
    const auto t0 = Clock::now();
    BuildOptions bo;
    bo.assembly.workers = ctx.workers();
    bo.with_mass = true;
    const LinearSystem sys = stage("assembly", [&] {
      return build_system(problem(cfg, cfg.geometry, cfg.energy, s, cfg.rhs[0]), mesh, bo);
    });
    const int n = static_cast<int>(w2.size());
    std::vector<ConditionEstimate> ce(n);
    parallel_jobs(n, ctx.workers(), [&](int i) {
      ce[i] = stage("solver", [&] { return condition_number(shifted_system(sys, *sys.M, w2[i]).A); });
    });
    std::vector<double> cond(n);
    Series ser{"s=" + key_number(s), {}, {}, true};
    for (int i = 0; i < n; ++i) {
      cond[i] = ce[i].value;
      t.rows.push_back({format_double(s), format_double(w2[i]), format_double(cond[i]), ce[i].singular ? "yes" : "no"});
      ser.x.push_back(w2[i]);
      ser.y.push_back(cond[i]);
    }
    f.series.push_back(std::move(ser));
    auto peaks = find_peaks(cond, cfg.peak_factor);
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return cond[a] > cond[b]; });
    for (std::size_t r = 0; r < peaks.size(); ++r) {
      p.rows.push_back({format_double(s), std::to_string(r + 1), format_double(w2[peaks[r]]), format_double(cond[peaks[r]])});
      ctx.report.scalars["peak" + std::to_string(r + 1) + "@s=" + key_number(s)] = w2[peaks[r]];
    }
    ctx.report.wall_seconds["sweep_s=" + key_number(s)] = seconds_since(t0);
    for (const auto& w : sys.warnings) ctx.report.warnings.push_back("s=" + key_number(s) + ": " + w);
  }
  // Dirichlet eigenvalues of the Laplacian on the disk, for reference.
  if (cfg.geometry.kind == GeometryKind::Disk || cfg.geometry.kind == GeometryKind::AnnularSplitDisk) {
    const double R = cfg.geometry.kind == GeometryKind::Disk ? cfg.geometry.radius : cfg.geometry.outer_radius;
    Table ref{"laplacian_eigenvalues", {"m [-]", "k [-]", "multiplicity [-]", "lambda [1/length^2]"}, {}};
    std::vector<std::array<double, 3>> vals;
    for (int m = 0; m <= 10; ++m)
      for (int k = 1; k <= 10; ++k) {
        const double j = stage("postprocess", [&] { return bessel_zero(m, k); });
        const double lambda = j * j / (R * R);
        if (lambda <= cfg.omega2.to) vals.push_back({lambda, double(m), double(k)});
      }
    std::sort(vals.begin(), vals.end());
    for (const auto& v : vals)
      ref.rows.push_back({std::to_string(int(v[1])), std::to_string(int(v[2])), v[1] == 0 ? "1" : "2", format_double(v[0])});
    ctx.report.tables.push_back(std::move(ref));
  }
  ctx.report.tables.push_back(std::move(t));
  ctx.report.tables.push_back(std::move(p));
  ctx.report.figures.push_back(std::move(f));
}

bool standard_square(const ExperimentConfig& cfg) {
  const Box& b = cfg.geometry.box;
  return cfg.geometry.kind == GeometryKind::SquareSplit && b.x0 == -0.5 && b.x1 == 0.5 && b.y0 == -0.5 &&
         b.y1 == 0.5 && cfg.rhs[0] == "square_split" && cfg.sigma_l == 1.0;
}

void energy_compare(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  // Reference: the local problem on all of Omega (exact for the standard square).
  const bool exact = standard_square(cfg);
  GeometrySpec whole = cfg.geometry;
  Solution local;
  Mesh local_mesh;
  std::optional<PointLocator> locator;
  double local_err = std::numeric_limits<double>::quiet_NaN();
  auto u_exact = [](Point p) { return (0.25 - p.x * p.x) * (0.25 - p.y * p.y); };
  {
    Box bb{1e300, -1e300, 1e300, -1e300};
    for (int v = 0; v < mesh.num_domain_nodes; ++v) {
      bb.x0 = std::min(bb.x0, mesh.nodes[v].x);
      bb.x1 = std::max(bb.x1, mesh.nodes[v].x);
      bb.y0 = std::min(bb.y0, mesh.nodes[v].y);
      bb.y1 = std::max(bb.y1, mesh.nodes[v].y);
    }
    if (cfg.geometry.kind != GeometryKind::SquareSplit)
      throw ConfigError("energy_compare needs a SQUARE_SPLIT geometry");
    whole = GeometrySpec::rect(cfg.geometry.box, Subdomain::Omega1);
    MeshOptions mo;
    mo.auxiliary = false;
    local_mesh = stage("mesh", [&] { return build_mesh(whole, cfg.mesh.h, mo); });
    ctx.report.meshes.push_back(stats_of(local_mesh, "local_reference"));
    ProblemSpec ps = problem(cfg, whole, EnergyKind::EII, 0.5, cfg.rhs[0]);
    local = stage("solver", [&] { return solve(build_system(ps, local_mesh), local_mesh); });
    local.mesh = &local_mesh;
    if (exact) local_err = stage("postprocess", [&] { return l2_error(local, u_exact); });
    locator.emplace(local_mesh);
  }
  ScalarField ref = exact ? ScalarField(u_exact) : ScalarField([&](Point p) {
    const auto hit = locator->locate(p);
    if (hit.triangle < 0) return 0.0;
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += hit.bary[i] * local.values[local_mesh.triangles[hit.triangle][i]];
    return v;
  });

  struct Job {
    EnergyKind e;
    double s;
  };
  std::vector<Job> jobs;
  for (double s : cfg.s_values)
    for (EnergyKind e : {EnergyKind::EI, EnergyKind::EII}) jobs.push_back({e, s});
  const int n = static_cast<int>(jobs.size());
  std::vector<Solved> runs(n);
  std::vector<double> err(n);
  parallel_jobs(n, ctx.workers(), [&](int i) {
    runs[i] = assemble_and_solve(ctx.assembly_workers(n), problem(cfg, cfg.geometry, jobs[i].e, jobs[i].s, cfg.rhs[0]), mesh);
    err[i] = stage("postprocess", [&] { return l2_error(runs[i].solution, ref); });
  });
  Table t{"discrepancy",
          {"s [1]", "l2_discrepancy_E_I [1]", "l2_discrepancy_E_II [1]", "local_reference [-]", "local_l2_error [1]"},
          {}};
  Figure f{"discrepancy_vs_s", "L2 distance to the local solution", "s", "||u_h - u_loc||", true, {}};
  f.series = {{"E_I", {}, {}, true}, {"E_II", {}, {}, true}};
  for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
    const double s = cfg.s_values[k];
    const double e1 = err[2 * k], e2 = err[2 * k + 1];
    t.rows.push_back({format_double(s), format_double(e1), format_double(e2), exact ? "exact" : "discrete",
                      format_double(local_err)});
    f.series[0].x.push_back(s);
    f.series[0].y.push_back(e1);
    f.series[1].x.push_back(s);
    f.series[1].y.push_back(e2);
    ctx.report.scalars["discrepancy_E_I@s=" + key_number(s)] = e1;
    ctx.report.scalars["discrepancy_E_II@s=" + key_number(s)] = e2;
    for (int q : {0, 1}) {
      const std::string label = std::string(q ? "E_II" : "E_I") + "_s=" + key_number(s);
      ctx.report.wall_seconds["solve_" + label] = runs[2 * k + q].seconds;
      add_warnings(ctx.report, label, runs[2 * k + q]);
    }
  }
  ctx.report.tables.push_back(std::move(t));
  ctx.report.figures.push_back(std::move(f));
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

void convergence(Context& ctx) {
  const auto tables = convergence_study(ctx.cfg, &ctx.report);
  Table t{"convergence",
          {"s [1]", "h [length]", "h_max [length]", "dofs [-]", "l2_error [1]", "energy_error [1]"},
          {}};
  Table r{"rates", {"s [1]", "l2_rate [1]", "energy_rate [1]"}, {}};
  Figure f{"energy_error_vs_h", "energy-norm error", "h", "error", true, {}};
  for (const auto& rt : tables) {
    Series ser{"s=" + key_number(rt.s), {}, {}, true};
    for (std::size_t k = 0; k < rt.rows.size(); ++k) {
      const auto& row = rt.rows[k];
      t.rows.push_back({format_double(rt.s), format_double(ctx.cfg.ladder[k]), format_double(row.h),
                        std::to_string(row.dofs), format_double(row.l2), format_double(row.energy)});
      ser.x.push_back(ctx.cfg.ladder[k]);
      ser.y.push_back(row.energy);
    }
    r.rows.push_back({format_double(rt.s), format_double(rt.l2_rate), format_double(rt.energy_rate)});
    ctx.report.scalars["energy_rate@s=" + key_number(rt.s)] = rt.energy_rate;
    ctx.report.scalars["l2_rate@s=" + key_number(rt.s)] = rt.l2_rate;
    f.series.push_back(std::move(ser));
  }
  ctx.report.tables.push_back(std::move(t));
  ctx.report.tables.push_back(std::move(r));
  ctx.report.figures.push_back(std::move(f));
}

void custom(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main");
  struct Job {
    std::string rhs;
    double s;
  };
  std::vector<Job> jobs;
  for (const auto& r : cfg.rhs)
    for (double s : cfg.s_values) jobs.push_back({r, s});
  const int n = static_cast<int>(jobs.size());
  std::vector<Solved> runs(n);
  std::vector<double> l2(n), probe(n);
  parallel_jobs(n, ctx.workers(), [&](int i) {
    runs[i] = assemble_and_solve(ctx.assembly_workers(n), problem(cfg, cfg.geometry, cfg.energy, jobs[i].s, jobs[i].rhs), mesh);
    l2[i] = stage("postprocess", [&] { return l2_error(runs[i].solution, [](Point) { return 0.0; }); });
    probe[i] = stage("postprocess", [&] { return evaluate(runs[i].solution, cfg.probe); });
  });
  Table t{"summary",
          {"rhs [-]", "energy [-]", "s [1]", "dofs [-]", "solver [-]", "max_abs_u [1]", "l2_norm [1]",
           "u_at_probe [1]"},
          {}};
  Table sl = slice_table();
  std::map<std::string, Figure> figs;
  for (int i = 0; i < n; ++i) {
    const Solution& sol = runs[i].solution;
    const std::string label = run_label(jobs[i].rhs, cfg.energy, jobs[i].s);
    t.rows.push_back({jobs[i].rhs, to_string(cfg.energy), format_double(jobs[i].s), std::to_string(runs[i].dofs),
                      sol.info.method, format_double(sol.values.cwiseAbs().maxCoeff()), format_double(l2[i]),
                      format_double(probe[i])});
    ctx.report.wall_seconds["solve_" + label] = runs[i].seconds;
    add_warnings(ctx.report, label, runs[i]);
    add_slices(cfg, sol, label, jobs[i].s, sl, figs);
    if (cfg.write_solution) ctx.report.tables.push_back(nodal_table(sol, mesh, "solution_" + label));
  }
  ctx.report.tables.push_back(std::move(t));
  finish_slices(ctx.report, std::move(sl), figs);
}

json stats_json(const MeshStats& m) {
  return {{"label", m.label},   {"omega1_triangles", m.omega1}, {"omega2_triangles", m.omega2},
          {"aux_triangles", m.exterior}, {"nodes", m.nodes}, {"h_max", m.h_max},
          {"h_min", m.h_min},   {"shape_regularity", m.shape_regularity}};
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentReport& report) {
  stage("output", [&] {
    fs::create_directories(cfg.out_dir);
    json files = json::array();
    for (const auto& t : report.tables) {
      write_csv((fs::path(cfg.out_dir) / (t.name + ".csv")).string(), t, cfg.hash);
      files.push_back(t.name + ".csv");
    }
    for (const auto& f : report.figures) {
      write_svg((fs::path(cfg.out_dir) / (f.name + ".svg")).string(), f);
      files.push_back(f.name + ".svg");
    }
    Table ms{"mesh_stats",
             {"mesh [-]", "omega1_triangles [-]", "omega2_triangles [-]", "aux_triangles [-]", "nodes [-]",
              "h_max [length]", "h_min [length]", "shape_regularity [1]"},
             {}};
    for (const auto& m : report.meshes)
      ms.rows.push_back({m.label, std::to_string(m.omega1), std::to_string(m.omega2), std::to_string(m.exterior),
                         std::to_string(m.nodes), format_double(m.h_max), format_double(m.h_min),
                         format_double(m.shape_regularity)});
    write_csv((fs::path(cfg.out_dir) / "mesh_stats.csv").string(), ms, cfg.hash);
    files.push_back("mesh_stats.csv");

    json rep;
    rep["config"] = report.config;
    rep["files"] = files;
    rep["meshes"] = json::array();
    for (const auto& m : report.meshes) rep["meshes"].push_back(stats_json(m));
    rep["scalars"] = json::object();
    for (const auto& [k, v] : report.scalars) rep["scalars"][k] = format_double(v);
    rep["warnings"] = report.warnings;
    std::ofstream(fs::path(cfg.out_dir) / "report.json", std::ios::binary) << rep.dump(2) << "\n";
    json tm = json::object();
    for (const auto& [k, v] : report.wall_seconds) tm[k] = v;
    std::ofstream(fs::path(cfg.out_dir) / "timings.json", std::ios::binary) << tm.dump(2) << "\n";
    return 0;
  });
}

ExperimentReport start_report(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.config = cfg.canonical;
  r.config["hash"] = cfg.hash;
  return r;
}

}  // namespace

ScalarField rhs_field(const std::string& name, const GeometrySpec& g) {
  if (name == "one") return [](Point) { return 1.0; };
  if (name == "chi_omega1") return [g](Point p) { return g.classify(p) == Subdomain::Omega1 ? 1.0 : 0.0; };
  if (name == "chi_omega2") return [g](Point p) { return g.classify(p) == Subdomain::Omega2 ? 1.0 : 0.0; };
  if (name == "square_split") return [](Point p) { return 1.0 - 2.0 * (p.x * p.x + p.y * p.y); };
  std::size_t used = 0;
  double c = 0.0;
  try {
    c = std::stod(name, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != name.size() || used == 0 || !std::isfinite(c))
    throw std::invalid_argument("unknown right-hand side '" + name +
                                "' (expected one, chi_omega1, chi_omega2, square_split or a number)");
  return [c](Point) { return c; };
}

std::vector<int> find_peaks(const std::vector<double>& v, double factor) {
  std::vector<int> out;
  if (v.size() < 3) return out;
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] > factor * median) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<RateTable> convergence_study(const ExperimentConfig& cfg, ExperimentReport* report) {
  if (cfg.ladder.size() < 3) throw std::invalid_argument("convergence study needs at least 3 mesh levels");
  ExperimentReport local_report;
  ExperimentReport& rep = report ? *report : local_report;
  Context ctx{cfg, rep};
  const bool ball = cfg.reference == "ball_exact";
  std::vector<Mesh> meshes;
  for (std::size_t k = 0; k < cfg.ladder.size(); ++k)
    meshes.push_back(context_mesh(ctx, cfg.geometry, cfg.ladder[k], "level" + std::to_string(k)));

  const GeometrySpec& g = cfg.geometry;
  struct Job {
    std::size_t si, level;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.s_values.size(); ++i)
    for (std::size_t k = 0; k < meshes.size(); ++k) jobs.push_back({i, k});
  std::vector<RateRow> rows(jobs.size());
  std::vector<Solved> runs(jobs.size());
  const int n = static_cast<int>(jobs.size());
  parallel_jobs(n, ctx.workers(), [&](int j) {
    const double s = cfg.s_values[jobs[j].si];
    const Mesh& mesh = meshes[jobs[j].level];
    RateRow row;
    row.h = mesh.h_max;
    if (ball) {
      const double c = ball_solution_constant(2, s) / cfg.sigma_nl, R2 = g.radius * g.radius;
      const Point c0 = g.center;
      ProblemSpec ps = problem(cfg, g, cfg.energy, s, "one");
      runs[j] = assemble_and_solve(ctx.assembly_workers(n), ps, mesh);
      ScalarField exact = [=](Point p) {
        const double r2 = dot(p - c0, p - c0);
        return r2 < R2 ? c * std::pow(R2 - r2, s) : 0.0;
      };
      row.l2 = stage("postprocess", [&] { return l2_error(runs[j].solution, exact); });
      // Galerkin orthogonality: |u - u_h|^2 = |u|^2 - b^T u_h.
      const double unorm2 = c * M_PI * std::pow(R2, s + 1.0) / (1.0 + s);
      const double uh2 = runs[j].b_dot_u;
      row.energy = std::sqrt(std::max(0.0, unorm2 - uh2));
    } else {
      const Box b = g.box;
      const double kx = M_PI / (b.x1 - b.x0), ky = M_PI / (b.y1 - b.y0);
      const double scale = cfg.sigma_l * (kx * kx + ky * ky);
      ProblemSpec ps = problem(cfg, g, cfg.energy, s, "one");
      ps.f = [=](Point p) { return scale * std::sin(kx * (p.x - b.x0)) * std::sin(ky * (p.y - b.y0)); };
      runs[j] = assemble_and_solve(ctx.assembly_workers(n), ps, mesh);
      row.l2 = stage("postprocess", [&] {
        return l2_error(runs[j].solution, [=](Point p) { return std::sin(kx * (p.x - b.x0)) * std::sin(ky * (p.y - b.y0)); });
      });
      row.energy = stage("postprocess", [&] {
        return h1_seminorm_error_omega1(runs[j].solution, [=](Point p) {
          return Point{kx * std::cos(kx * (p.x - b.x0)) * std::sin(ky * (p.y - b.y0)),
                       ky * std::sin(kx * (p.x - b.x0)) * std::cos(ky * (p.y - b.y0))};
        });
      });
    }
    row.dofs = runs[j].dofs;
    rows[j] = row;
  });
  std::vector<RateTable> out;
  for (std::size_t i = 0; i < cfg.s_values.size(); ++i) {
    RateTable rt;
    rt.s = cfg.s_values[i];
    std::vector<double> hs, l2, en;
    for (std::size_t j = 0; j < jobs.size(); ++j)
      if (jobs[j].si == i) {
        rt.rows.push_back(rows[j]);
        hs.push_back(cfg.ladder[jobs[j].level]);
        l2.push_back(rows[j].l2);
        en.push_back(rows[j].energy);
        const std::string label = "s=" + key_number(rt.s) + "_h=" + key_number(cfg.ladder[jobs[j].level]);
        rep.wall_seconds["solve_" + label] = runs[j].seconds;
        add_warnings(rep, label, runs[j]);
      }
    rt.l2_rate = least_squares_slope(hs, l2);
    rt.energy_rate = least_squares_slope(hs, en);
    out.push_back(rt);
  }
  return out;
}

ExperimentReport run(const ExperimentConfig& cfg, bool write) {
  ExperimentReport report = start_report(cfg);
  Context ctx{cfg, report};
  const auto t0 = Clock::now();
  switch (cfg.experiment) {
    case Experiment::InterfaceSweep: interface_sweep(ctx); break;
    case Experiment::Isolated: isolated(ctx); break;
    case Experiment::Singularity: singularity(ctx); break;
    case Experiment::Eigensweep: eigensweep(ctx); break;
    case Experiment::EnergyCompare: energy_compare(ctx); break;
    case Experiment::Convergence: convergence(ctx); break;
    case Experiment::Custom: custom(ctx); break;
  }
  report.wall_seconds["total"] = seconds_since(t0);
  if (write) write_outputs(cfg, report);
  return report;
}

ExperimentReport mesh_only(const ExperimentConfig& cfg, bool write) {
  ExperimentReport report = start_report(cfg);
  Context ctx{cfg, report};
  std::vector<std::pair<std::string, Mesh>> meshes;
  if (cfg.experiment == Experiment::Convergence) {
    for (std::size_t k = 0; k < cfg.ladder.size(); ++k)
      meshes.emplace_back("level" + std::to_string(k), context_mesh(ctx, cfg.geometry, cfg.ladder[k], "level" + std::to_string(k)));
  } else {
    meshes.emplace_back("main", context_mesh(ctx, cfg.geometry, cfg.mesh.h, "main"));
  }
  if (write) {
    write_outputs(cfg, report);
    stage("output", [&] {
      for (const auto& [label, m] : meshes) write_mesh((fs::path(cfg.out_dir) / ("mesh_" + label + ".txt")).string(), m);
      return 0;
    });
  }
  return report;
}

}  // namespace nlfem::harness
