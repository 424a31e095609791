// nlfem_cli: run <config> | mesh <config> | check
// Exit codes: 0 success, 2 invalid input, 1 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>
#include <json.hpp>

#include "nlfem/harness.hpp"

#ifndef NLFEM_PRESET_DIR
#define NLFEM_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace nlfem::harness;

namespace {

void error_record(const std::string& stage, const std::string& message) {
  nlohmann::json j;
  j["error"] = {{"stage", stage}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

std::string preset_path(const std::string& name) {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("NLFEM_PRESET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back("presets");
  dirs.emplace_back(NLFEM_PRESET_DIR);
  for (const auto& d : dirs) {
    const fs::path p = d / (name + ".json");
    if (fs::exists(p)) return p.string();
  }
  throw ConfigError("preset '" + name + "' not found (looked in $NLFEM_PRESET_DIR, ./presets, " NLFEM_PRESET_DIR ")");
}

ExperimentConfig resolve(const std::string& config, const std::string& preset, const std::string& out, int workers) {
  if (config.empty() == preset.empty()) throw ConfigError("give exactly one of a config file or --preset NAME");
  ExperimentConfig cfg = load_config(preset.empty() ? config : preset_path(preset));
  if (!out.empty()) cfg.out_dir = out;
  if (workers >= 0) cfg.workers = workers;
  return cfg;
}

void print_report(const ExperimentConfig& cfg, const ExperimentReport& rep) {
  std::printf("%s (%s), config hash %s\n", cfg.name.c_str(), to_string(cfg.experiment).c_str(), cfg.hash.c_str());
  for (const auto& m : rep.meshes)
    std::printf("  mesh %-16s omega1 %d omega2 %d aux %d triangles, h_max %.4g, h_min %.3g\n", m.label.c_str(), m.omega1,
                m.omega2, m.exterior, m.h_max, m.h_min);
  for (const auto& [k, v] : rep.scalars) std::printf("  %-40s %.10g\n", k.c_str(), v);
  for (const auto& w : rep.warnings) std::printf("  warning: %s\n", w.c_str());
  std::printf("  outputs in %s\n", cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled local/nonlocal P1 finite element experiments"};
  app.require_subcommand(1);
  std::string config, preset, out;
  int workers = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "experiment config (JSON)");
    sub->add_option("--preset", preset, "name of a shipped preset instead of a config file");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--workers", workers, "threads; 0 uses all")->check(CLI::NonNegativeNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment");
  add_common(run_cmd);
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "build and export the meshes of an experiment");
  add_common(mesh_cmd);
  CLI::App* check_cmd = app.add_subcommand("check", "run the property suite");
  check_cmd->add_option("--out", out, "also write check results as CSV into this directory");
  check_cmd->add_option("--workers", workers, "threads; 0 uses all")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check_cmd) {
      if (workers > 0) omp_set_num_threads(workers);
      const auto results = property_suite();
      bool ok = true;
      Table t{"check", {"check [-]", "pass [-]", "value [1]", "tolerance [1]", "detail [-]"}, {}};
      for (const auto& r : results) {
        std::printf("%s  %-62s value %.3e  tol %.1e  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value,
                    r.tolerance, r.detail.c_str());
        ok = ok && r.pass;
        t.rows.push_back({r.name, r.pass ? "yes" : "no", format_double(r.value), format_double(r.tolerance), r.detail});
      }
      if (!out.empty()) {
        fs::create_directories(out);
        write_csv((fs::path(out) / "check.csv").string(), t, config_hash(nlohmann::json("check")));
      }
      return ok ? 0 : 1;
    }
    const ExperimentConfig cfg = resolve(config, preset, out, workers);
    if (*mesh_cmd) {
      print_report(cfg, mesh_only(cfg));
      return 0;
    }
    print_report(cfg, run(cfg));
    return 0;
  } catch (const ConfigError& e) {
    error_record("config", e.what());
    return 2;
  } catch (const RunError& e) {
    error_record(e.stage(), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_record("runtime", e.what());
    return 1;
  }
}
