#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mixfrac/measures.hpp"
#include "mixfrac/qvector.hpp"

namespace mixfrac::cli {

enum class Task { moments, exponents, spectrum, gibbs, largedev, verify };

std::string_view to_string(Task task) noexcept;

struct SchemaIssue {
  std::string pointer;  // JSON pointer into the config, e.g. "/depths/min"
  std::string message;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaIssue> issues);
  const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<SchemaIssue> issues_;
};

struct MeasureSpec {
  std::string kind;  // "multinomial" or "empirical"
  int base = 2;
  std::vector<double> weights;
  std::vector<Atom> atoms;
};

struct LargeDevOptions {
  bool montecarlo = true;
  std::size_t samples = 10000;
  DepthRange n{8, 14};
  std::optional<QVector> q;  // Gibbs exponent; zero vector when absent
};

struct RunConfig {
  std::vector<MeasureSpec> measures;
  std::vector<QVector> q_grid;
  DepthRange depths;
  std::vector<Task> tasks;  // dependency order
  std::optional<std::uint64_t> seed;
  double xi = 2.0;
  std::map<std::string, double> tolerances;
  LargeDevOptions largedev;
  nlohmann::ordered_json echo;

  bool has(Task task) const;
  double tolerance(const std::string& name) const;
  VectorMeasure build_measure() const;
};

/// Tolerance names and their defaults.
const std::map<std::string, double>& default_tolerances();

/// Validates the whole document and reports every problem at once.
RunConfig parse_config(std::string_view text);

}  // namespace mixfrac::cli
