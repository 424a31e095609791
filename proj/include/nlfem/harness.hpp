#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlfem/assembly.hpp"
#include "nlfem/mesh.hpp"

namespace nlfem::harness {

/// Bad config: exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure inside a run; `stage` names the module that threw.
class RunError : public std::runtime_error {
 public:
  RunError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Experiment { InterfaceSweep, Isolated, Singularity, Eigensweep, EnergyCompare, Convergence, Custom };
std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

struct MeshParams {
  double h = 0.1;
  double mu = 1.0;  // 1: quasi-uniform
  std::optional<GradingTarget> target;
  Point point{};
  bool auxiliary = true;
  double far_radius_factor = 2.0;
};

struct SliceSpec {
  std::string name;
  Point from{};
  Point to{};
  int samples = 11;
};

struct Range {
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  std::string name;
  Experiment experiment = Experiment::Custom;
  GeometrySpec geometry;
  EnergyKind energy = EnergyKind::EII;
  std::vector<double> s_values;
  MeshParams mesh;
  /// Mesh sizes for the convergence ladder.
  std::vector<double> ladder;
  /// "one", "chi_omega1", "chi_omega2", "square_split" or a number.
  std::vector<std::string> rhs{"one"};
  double sigma_l = 1.0;
  double sigma_nl = 1.0;
  QuadratureConfig quad;
  Point probe{1.0, 0.0};
  std::vector<SliceSpec> slices;
  Range omega2;
  double peak_factor = 5.0;
  /// Convergence reference: "ball_exact" or "local_sine".
  std::string reference = "ball_exact";
  bool write_solution = false;
  bool slow = false;
  std::string out_dir = "out";
  int workers = 0;  // 0: all threads
  /// Normalized config (output and worker settings removed).
  nlohmann::json canonical;
  std::string hash;  // 16 hex digits
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// FNV-1a 64 of the canonical dump.
std::string config_hash(const nlohmann::json& canonical);

struct Table {
  std::string name;
  std::vector<std::string> columns;  // "name [unit]"
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);
void write_csv(const std::string& path, const Table& table, const std::string& hash);
std::string csv_text(const Table& table, const std::string& hash);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;
};

struct Figure {
  std::string name;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  std::vector<Series> series;
};

std::string svg_text(const Figure& fig);
void write_svg(const std::string& path, const Figure& fig);

struct MeshStats {
  std::string label;
  int omega1 = 0;
  int omega2 = 0;
  int exterior = 0;
  int nodes = 0;
  double h_max = 0.0;
  double h_min = 0.0;
  double shape_regularity = 0.0;
};

struct ExperimentReport {
  nlohmann::json config;
  std::vector<Table> tables;
  std::vector<Figure> figures;
  std::vector<MeshStats> meshes;
  std::map<std::string, double> scalars;
  std::map<std::string, double> wall_seconds;  // kept out of the stable outputs
  std::vector<std::string> warnings;
};

/// Runs the experiment and writes CSV/SVG files plus report.json into
/// cfg.out_dir (timings go to timings.json, which is not reproducible).
ExperimentReport run(const ExperimentConfig& cfg, bool write = true);

/// Meshes only, written in the text mesh format.
ExperimentReport mesh_only(const ExperimentConfig& cfg, bool write = true);

struct RateRow {
  double h = 0.0;
  int dofs = 0;
  double l2 = 0.0;
  double energy = 0.0;
};
struct RateTable {
  double s = 0.0;
  std::vector<RateRow> rows;
  double l2_rate = 0.0;
  double energy_rate = 0.0;
};
/// Errors along cfg.ladder (at least 3 levels) for each s, with
/// least-squares rates in h_max.
std::vector<RateTable> convergence_study(const ExperimentConfig& cfg, ExperimentReport* report = nullptr);

/// Interior local maxima above factor * median.
std::vector<int> find_peaks(const std::vector<double>& v, double factor);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};
/// Quick self-checks of the invariants of the discrete operators.
std::vector<CheckResult> property_suite();

/// Right-hand side from its config name.
ScalarField rhs_field(const std::string& name, const GeometrySpec& g);

}  // namespace nlfem::harness
