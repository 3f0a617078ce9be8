#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixfrac_cli/config.hpp"
#include "mixfrac_cli/runner.hpp"

using namespace mixfrac;
using namespace mixfrac::cli;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "measures": [{"kind": "multinomial", "base": 2, "weights": [0.5, 0.5]}],
  "q_grid": {"min": -2, "max": 2, "step": 1},
  "depths": {"min": 4, "max": 10},
  "tasks": ["moments"]
})";

std::vector<std::string> pointers(std::string_view text) {
  try {
    parse_config(text);
  } catch (const SchemaError& e) {
    std::vector<std::string> out;
    for (const auto& i : e.issues()) out.push_back(i.pointer);
    return out;
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mixfrac_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, MinimalIsValid) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.q_grid.size(), 5u);
  EXPECT_EQ(c.depths.min, 4);
  EXPECT_TRUE(c.has(Task::moments));
  EXPECT_FALSE(c.has(Task::verify));
  EXPECT_DOUBLE_EQ(c.xi, 2.0);
  EXPECT_DOUBLE_EQ(c.tolerance("oracle"), 1e-9);
}

TEST(Config, DepthsMinBelowTwo) {
  std::string text = kMinimal;
  text.replace(text.find("\"min\": 4"), 8, "\"min\": 1");
  EXPECT_TRUE(has(pointers(text), "/depths/min"));
}

TEST(Config, LargedevNeedsSeed) {
  const auto p = pointers(R"({
    "measures": [{"kind": "multinomial", "base": 2, "weights": [0.25, 0.75]}],
    "q_grid": [[0], [1]],
    "depths": {"min": 4, "max": 8},
    "tasks": ["gibbs", "largedev"]
  })");
  EXPECT_TRUE(has(p, "/seed"));
}

TEST(Config, ReportsEveryProblem) {
  const auto p = pointers(R"({
    "measures": [{"kind": "multinomial", "base": 2, "weights": [0.3, 0.3]}],
    "q_grid": {"min": 1, "max": 0, "step": 1},
    "depths": {"min": 1, "max": 30},
    "tasks": ["spectrum"],
    "colour": 3
  })");
  EXPECT_GE(p.size(), 5u);
  EXPECT_TRUE(has(p, "/depths/min"));
  EXPECT_TRUE(has(p, "/colour"));
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const auto cfg = parse_config(R"({
    "measures": [{"kind": "multinomial", "base": 2, "weights": [0.25, 0.75]}],
    "q_grid": {"min": -2, "max": 2, "step": 0.5},
    "depths": {"min": 4, "max": 10},
    "tasks": ["moments", "exponents", "spectrum", "gibbs", "largedev"],
    "seed": 17,
    "largedev": {"samples": 2000, "n": {"min": 6, "max": 10}}
  })");
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto ra = run(cfg, {Command::analyze, a, 1, std::nullopt});
  const auto rb = run(cfg, {Command::analyze, b, 3, std::nullopt});
  EXPECT_EQ(ra.to_json().dump(), rb.to_json().dump());
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() == "timings.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 5u);
  EXPECT_TRUE(fs::exists(a / "tau.csv"));
  EXPECT_TRUE(fs::exists(a / "spectrum.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, TauFileHoldsTheClosedForm) {
  const auto cfg = parse_config(R"({
    "measures": [{"kind": "multinomial", "base": 2, "weights": [0.25, 0.75]}],
    "q_grid": [[2]],
    "depths": {"min": 4, "max": 8},
    "tasks": ["moments", "exponents"]
  })");
  const auto out = scratch("tau");
  const auto r = run(cfg, {Command::analyze, out, 1, std::nullopt});
  EXPECT_EQ(exit_code(r), 0);
  const auto tau = slurp(out / "tau.csv");
  const auto row = tau.substr(tau.find('\n') + 1);
  ASSERT_FALSE(row.empty());
  // q_1,kind,t_star,...
  std::stringstream ss(row);
  std::string q, kind, v;
  std::getline(ss, q, ',');
  std::getline(ss, kind, ',');
  std::getline(ss, v, ',');
  EXPECT_NEAR(std::stod(v), std::log2(0.625), 1e-4);
  fs::remove_all(out);
}

TEST(Run, FailuresReachTheExitCode) {
  RunReport r;
  r.checks.push_back({"x", "pass", 0.0, 1.0});
  EXPECT_EQ(exit_code(r), 0);
  r.checks.push_back({"y", "fail", 2.0, 1.0});
  EXPECT_EQ(exit_code(r), 1);
  EXPECT_FALSE(r.all_pass());
}
