#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixfrac/gibbs_largedev.hpp"
#include "mixfrac_cli/config.hpp"

namespace mixfrac::cli {

enum class Command { analyze, verify, oracle_compare };

std::string_view to_string(Command command) noexcept;

struct RunOptions {
  Command command = Command::analyze;
  std::filesystem::path out_dir = "out";
  unsigned threads = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

struct CheckResult {
  std::string name;
  std::string status;  // pass, fail or skipped
  double statistic = 0.0;
  double threshold = 0.0;
};

struct TaskResult {
  std::string name;
  std::string status;  // pass, fail or skipped
  std::vector<std::string> outputs;
  std::string error;
};

struct RunReport {
  nlohmann::ordered_json config;
  std::string command;
  std::vector<TaskResult> tasks;
  std::vector<CheckResult> checks;
  std::vector<Claim> claims;
  std::map<std::string, double> timings;  // seconds; written to timings.json only

  bool all_pass() const;
  /// Everything except timings, so reruns compare byte for byte.
  nlohmann::ordered_json to_json() const;
};

/// Executes the configured tasks and writes artifacts into options.out_dir.
/// Task failures are recorded, not thrown; IoError escapes when the output
/// directory cannot be written.
RunReport run(const RunConfig& config, const RunOptions& options);

/// 0 when every task and check passed, 1 otherwise.
int exit_code(const RunReport& report);

}  // namespace mixfrac::cli
