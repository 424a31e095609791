#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nlfem/harness.hpp"

using namespace nlfem;
using namespace nlfem::harness;
using nlohmann::json;

namespace {

json small_custom() {
  return json::parse(R"({
    "experiment": "custom",
    "geometry": {"kind": "SQUARE_SPLIT", "box": [-0.5, 0.5, -0.5, 0.5], "split": 0.1},
    "energy": "E_II",
    "s": 0.6,
    "mesh": {"h": 0.25},
    "slices": [{"name": "mid", "from": [-0.5, 0], "to": [0.5, 0], "samples": 9}]
  })");
}

void expect_config_error(json j, const std::string& needle) {
  try {
    parse_config(j);
    ADD_FAILURE() << "accepted: " << j.dump();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Config, EveryPresetParses) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(NLFEM_PRESET_DIR)) {
    if (e.path().extension() != ".json") continue;
    const ExperimentConfig c = load_config(e.path().string());
    EXPECT_EQ(c.hash.size(), 16u) << e.path();
    EXPECT_FALSE(c.s_values.empty()) << e.path();
    ++n;
  }
  EXPECT_GE(n, 7);
}

TEST(Config, RejectsBadInput) {
  json j = small_custom();
  j["colour"] = "red";
  expect_config_error(j, "colour");
  j = small_custom();
  j["s"] = 1.0;
  expect_config_error(j, "s");
  j = small_custom();
  j["s"] = json::array();
  expect_config_error(j, "s");
  j = small_custom();
  j["geometry"]["kind"] = "HEXAGON";
  expect_config_error(j, "geometry");
  j = small_custom();
  j["mesh"]["h"] = -0.1;
  expect_config_error(j, "mesh.h");
  j = small_custom();
  j["mesh"]["mu"] = 2.0;
  expect_config_error(j, "target");
  j = small_custom();
  j["experiment"] = "convergence";
  j["ladder"] = {0.2, 0.1};
  expect_config_error(j, "ladder");
  j = small_custom();
  j["rhs"] = "sunshine";
  expect_config_error(j, "rhs");
  j = small_custom();
  j["experiment"] = "eigensweep";
  expect_config_error(j, "omega2");
  j = small_custom();
  j["workers"] = -1;
  expect_config_error(j, "workers");
  j = small_custom();
  j["geometry"] = {{"kind", "ANNULAR_SPLIT_DISK"}, {"radius", 2.0}, {"outer_radius", 1.0}};
  expect_config_error(j, "geometry");
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashIgnoresOutputAndWorkers) {
  json a = small_custom(), b = small_custom();
  b["output"] = "/tmp/elsewhere";
  b["workers"] = 3;
  b["description"] = "same problem";
  EXPECT_EQ(parse_config(a).hash, parse_config(b).hash);
  b["s"] = 0.61;
  EXPECT_NE(parse_config(a).hash, parse_config(b).hash);
  // Defaults spelled out hash the same as defaults left implicit.
  json c = small_custom();
  c["mesh"]["mu"] = 1.0;
  c["rhs"] = "one";
  EXPECT_EQ(parse_config(a).hash, parse_config(c).hash);
}

TEST(Config, RangeValues) {
  const Range r{0.1, 9.9, 0.1};
  const auto v = r.values();
  ASSERT_EQ(v.size(), 99u);
  EXPECT_EQ(v.front(), 0.1);
  EXPECT_EQ(v[29], 3.0);
  EXPECT_EQ(v.back(), 9.9);
}

TEST(Csv, QuotingLineEndingsAndDigits) {
  Table t{"t", {"x [m]", "label [-]"}, {{format_double(0.1), "a,b"}, {format_double(1.0 / 3.0), "say \"hi\""}}};
  const std::string text = csv_text(t, "0123456789abcdef");
  EXPECT_EQ(text,
            "x [m],label [-],config_hash=0123456789abcdef\r\n"
            "0.10000000000000001,\"a,b\",0123456789abcdef\r\n"
            "0.33333333333333331,\"say \"\"hi\"\"\",0123456789abcdef\r\n");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  t.rows.push_back({"1"});
  EXPECT_THROW(csv_text(t, "x"), std::logic_error);
}

TEST(Svg, DeterministicAndWellFormed) {
  Figure f{"f", "title & more", "x", "y", true, {{"a<b", {1, 2, 3}, {1e-3, 1e-1, 10}, true}, {"pts", {1, 2}, {2, 3}, false}}};
  const std::string a = svg_text(f), b = svg_text(f);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("title &amp; more"), std::string::npos);
  EXPECT_EQ(a.find("a<b"), std::string::npos);
}

TEST(Peaks, LocalMaximaAboveFactorTimesMedian) {
  const std::vector<double> v{1, 1, 9, 1, 1, 4, 1, 1, 12, 11, 1, 30};
  EXPECT_EQ(find_peaks(v, 5.0), (std::vector<int>{2, 8}));
  EXPECT_EQ(find_peaks(v, 3.0), (std::vector<int>{2, 5, 8}));
  EXPECT_TRUE(find_peaks({1, 2}, 1.0).empty());
}

TEST(Rhs, NamedFields) {
  const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5}, 0.0);
  EXPECT_EQ(rhs_field("one", g)({0.3, 0.2}), 1.0);
  EXPECT_EQ(rhs_field("chi_omega1", g)({-0.3, 0.2}), 1.0);
  EXPECT_EQ(rhs_field("chi_omega1", g)({0.3, 0.2}), 0.0);
  EXPECT_EQ(rhs_field("chi_omega2", g)({0.3, 0.2}), 1.0);
  EXPECT_DOUBLE_EQ(rhs_field("square_split", g)({0.5, 0.5}), 0.0);
  EXPECT_EQ(rhs_field("-2.5", g)({0.0, 0.0}), -2.5);
  EXPECT_THROW(rhs_field("2.5x", g), std::invalid_argument);
}

TEST(Run, SmallCustomRunIsReproducibleAndWritesOutputs) {
  ExperimentConfig cfg = parse_config(small_custom());
  const auto dir = std::filesystem::temp_directory_path() / "nlfem_test_harness_run";
  std::filesystem::remove_all(dir);
  cfg.out_dir = dir.string();
  cfg.workers = 1;
  const ExperimentReport a = run(cfg, true);
  const ExperimentReport b = run(cfg, false);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  ASSERT_FALSE(a.tables.empty());
  for (std::size_t k = 0; k < a.tables.size(); ++k) {
    EXPECT_EQ(a.tables[k].columns, b.tables[k].columns);
    EXPECT_EQ(a.tables[k].rows, b.tables[k].rows);
  }
  EXPECT_EQ(a.meshes.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "timings.json"));
  std::ifstream in(dir / "report.json");
  const json report = json::parse(in);
  EXPECT_EQ(report.dump().find("wall"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Run, PropertySuitePasses) {
  for (const CheckResult& c : property_suite()) EXPECT_TRUE(c.pass) << c.name << ": " << c.value << " > " << c.tolerance;
}
