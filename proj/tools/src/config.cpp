#include "mixfrac_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mixfrac::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr int kMaxDepth = 24;

std::string join_issues(const std::vector<SchemaIssue>& issues) {
  std::string out = std::to_string(issues.size()) + " problem(s) in config";
  for (const auto& i : issues) out += "\n  " + (i.pointer.empty() ? "/" : i.pointer) + ": " + i.message;
  return out;
}

class Checker {
 public:
  void fail(std::string pointer, std::string message) {
    issues.push_back({std::move(pointer), std::move(message)});
  }

  std::optional<double> number(const json& j, const std::string& ptr) {
    if (!j.is_number()) {
      fail(ptr, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(ptr, "expected a finite number");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) {
      fail(ptr, "expected an integer");
      return std::nullopt;
    }
    return j.get<long long>();
  }

  std::vector<SchemaIssue> issues;
};

std::optional<Task> task_from_string(const std::string& s) {
  for (Task t : {Task::moments, Task::exponents, Task::spectrum, Task::gibbs, Task::largedev, Task::verify})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::vector<double> axis_values(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= count; ++i) {
    // snap to a 1e-12 lattice so 0.1-type steps do not drift
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

std::vector<QVector> cartesian(const std::vector<std::vector<double>>& axes) {
  std::vector<QVector> out;
  std::vector<std::size_t> pos(axes.size(), 0);
  if (axes.empty() || std::any_of(axes.begin(), axes.end(), [](const auto& a) { return a.empty(); }))
    return out;
  for (;;) {
    QVector q(axes.size(), 0.0);
    for (std::size_t j = 0; j < axes.size(); ++j) q[j] = axes[j][pos[j]];
    out.push_back(q);
    std::size_t j = axes.size();
    for (;;) {
      if (j == 0) return out;
      --j;
      if (++pos[j] < axes[j].size()) break;
      pos[j] = 0;
    }
  }
}

void parse_measures(const json& root, Checker& c, RunConfig& cfg) {
  if (!root.contains("measures")) {
    c.fail("/measures", "required");
    return;
  }
  const json& ms = root["measures"];
  if (!ms.is_array() || ms.empty()) {
    c.fail("/measures", "expected a nonempty array of measure specs");
    return;
  }
  std::optional<int> common_base;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string ptr = "/measures/" + std::to_string(i);
    const json& m = ms[i];
    if (!m.is_object() || !m.contains("kind") || !m["kind"].is_string()) {
      c.fail(ptr + "/kind", "expected \"multinomial\" or \"empirical\"");
      continue;
    }
    MeasureSpec spec;
    spec.kind = m["kind"].get<std::string>();
    if (spec.kind == "multinomial") {
      const auto base = m.contains("base") ? c.integer(m["base"], ptr + "/base") : std::nullopt;
      if (!m.contains("base")) c.fail(ptr + "/base", "required");
      if (base && *base < 2) c.fail(ptr + "/base", "base must be >= 2");
      if (base && common_base && *base != *common_base)
        c.fail(ptr + "/base", "multinomial components must share one base");
      if (base && *base >= 2) {
        spec.base = static_cast<int>(*base);
        if (!common_base) common_base = spec.base;
      }
      if (!m.contains("weights") || !m["weights"].is_array()) {
        c.fail(ptr + "/weights", "expected an array of probabilities");
      } else {
        const json& w = m["weights"];
        double sum = 0.0;
        bool ok = true;
        for (std::size_t d = 0; d < w.size(); ++d) {
          const auto v = c.number(w[d], ptr + "/weights/" + std::to_string(d));
          if (!v) {
            ok = false;
            continue;
          }
          if (*v < 0.0) {
            c.fail(ptr + "/weights/" + std::to_string(d), "weights must be >= 0");
            ok = false;
          }
          spec.weights.push_back(*v);
          sum += *v;
        }
        if (base && static_cast<long long>(w.size()) != *base)
          c.fail(ptr + "/weights", "expected " + std::to_string(*base) + " weights");
        else if (ok && std::abs(sum - 1.0) > 1e-9)
          c.fail(ptr + "/weights", "weights must sum to 1");
      }
    } else if (spec.kind == "empirical") {
      if (!m.contains("atoms") || !m["atoms"].is_array() || m["atoms"].empty()) {
        c.fail(ptr + "/atoms", "expected a nonempty array of [position, weight] pairs");
      } else {
        double sum = 0.0;
        for (std::size_t a = 0; a < m["atoms"].size(); ++a) {
          const std::string ap = ptr + "/atoms/" + std::to_string(a);
          const json& atom = m["atoms"][a];
          if (!atom.is_array() || atom.size() != 2) {
            c.fail(ap, "expected [position, weight]");
            continue;
          }
          const auto x = c.number(atom[0], ap + "/0");
          const auto w = c.number(atom[1], ap + "/1");
          if (x && !(*x >= 0.0 && *x <= 1.0)) c.fail(ap + "/0", "position must lie in [0, 1]");
          if (w && !(*w > 0.0)) c.fail(ap + "/1", "weight must be > 0");
          if (x && w) {
            spec.atoms.push_back({*x, *w});
            sum += *w;
          }
        }
        if (std::abs(sum - 1.0) > 1e-9) c.fail(ptr + "/atoms", "atom weights must sum to 1");
      }
    } else {
      c.fail(ptr + "/kind", "unknown measure kind '" + spec.kind + "'");
      continue;
    }
    cfg.measures.push_back(std::move(spec));
  }
  if (common_base)
    for (auto& spec : cfg.measures) spec.base = *common_base;
}

void parse_q_grid(const json& root, Checker& c, RunConfig& cfg, std::size_t k) {
  if (!root.contains("q_grid")) {
    c.fail("/q_grid", "required");
    return;
  }
  const json& g = root["q_grid"];
  auto range = [&](const json& r, const std::string& ptr) -> std::vector<double> {
    if (!r.is_object()) {
      c.fail(ptr, "expected {min, max, step}");
      return {};
    }
    std::optional<double> lo, hi, step;
    for (const char* key : {"min", "max", "step"}) {
      if (!r.contains(key)) {
        c.fail(ptr + "/" + key, "required");
        continue;
      }
      const auto v = c.number(r[key], ptr + "/" + key);
      if (std::string_view(key) == "min") lo = v;
      if (std::string_view(key) == "max") hi = v;
      if (std::string_view(key) == "step") step = v;
    }
    if (step && !(*step > 0.0)) {
      c.fail(ptr + "/step", "step must be > 0");
      return {};
    }
    if (lo && hi && *hi < *lo) {
      c.fail(ptr + "/max", "max must be >= min");
      return {};
    }
    if (!lo || !hi || !step) return {};
    if ((*hi - *lo) / *step > 1e6) {
      c.fail(ptr + "/step", "grid has more than 1e6 points per axis");
      return {};
    }
    return axis_values(*lo, *hi, *step);
  };

  if (g.is_object()) {
    const auto axis = range(g, "/q_grid");
    cfg.q_grid = cartesian(std::vector<std::vector<double>>(k, axis));
  } else if (g.is_array() && !g.empty() && g[0].is_object()) {
    if (g.size() != k) c.fail("/q_grid", "expected one range per component (" + std::to_string(k) + ")");
    std::vector<std::vector<double>> axes;
    for (std::size_t j = 0; j < g.size(); ++j) axes.push_back(range(g[j], "/q_grid/" + std::to_string(j)));
    if (g.size() == k) cfg.q_grid = cartesian(axes);
  } else if (g.is_array() && !g.empty()) {
    std::set<QVector> seen;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string ptr = "/q_grid/" + std::to_string(i);
      if (!g[i].is_array() || g[i].size() != k) {
        c.fail(ptr, "expected an array of " + std::to_string(k) + " numbers");
        continue;
      }
      QVector q(k, 0.0);
      bool ok = true;
      for (std::size_t j = 0; j < k; ++j) {
        const auto v = c.number(g[i][j], ptr + "/" + std::to_string(j));
        ok = ok && v.has_value();
        if (v) q[j] = *v;
      }
      if (!ok) continue;
      if (!seen.insert(q).second) {
        c.fail(ptr, "duplicate grid point");
        continue;
      }
      cfg.q_grid.push_back(q);
    }
  } else {
    c.fail("/q_grid", "expected an explicit list, {min, max, step}, or one range per axis");
    return;
  }
  if (cfg.q_grid.empty() && c.issues.empty()) c.fail("/q_grid", "grid is empty");
}

void parse_depths(const json& root, Checker& c, RunConfig& cfg) {
  if (!root.contains("depths") || !root["depths"].is_object()) {
    c.fail("/depths", "expected {min, max}");
    return;
  }
  const json& d = root["depths"];
  std::optional<long long> lo, hi;
  if (!d.contains("min")) c.fail("/depths/min", "required");
  else lo = c.integer(d["min"], "/depths/min");
  if (!d.contains("max")) c.fail("/depths/max", "required");
  else hi = c.integer(d["max"], "/depths/max");
  if (lo && *lo < 2) c.fail("/depths/min", "depths.min must be >= 2");
  if (hi && *hi > kMaxDepth) c.fail("/depths/max", "depths.max must be <= " + std::to_string(kMaxDepth));
  if (lo && hi && *hi < *lo) c.fail("/depths/max", "depths.max must be >= depths.min");
  if (lo && hi) cfg.depths = {static_cast<int>(*lo), static_cast<int>(*hi)};
}

void parse_tasks(const json& root, Checker& c, RunConfig& cfg) {
  if (!root.contains("tasks") || !root["tasks"].is_array() || root["tasks"].empty()) {
    c.fail("/tasks", "expected a nonempty array of task names");
    return;
  }
  std::set<Task> tasks;
  const json& ts = root["tasks"];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string ptr = "/tasks/" + std::to_string(i);
    const auto task = ts[i].is_string() ? task_from_string(ts[i].get<std::string>()) : std::nullopt;
    if (!task) {
      c.fail(ptr, "unknown task; expected moments, exponents, spectrum, gibbs, largedev or verify");
      continue;
    }
    if (!tasks.insert(*task).second) c.fail(ptr, "duplicate task");
  }
  if (tasks.count(Task::spectrum) && !(tasks.count(Task::moments) && tasks.count(Task::exponents)))
    c.fail("/tasks", "spectrum needs moments and exponents");
  if (tasks.count(Task::exponents) && !tasks.count(Task::moments))
    c.fail("/tasks", "exponents needs moments");
  if (tasks.count(Task::largedev) && !tasks.count(Task::gibbs))
    c.fail("/tasks", "largedev needs gibbs");
  cfg.tasks.assign(tasks.begin(), tasks.end());
}

void parse_largedev(const json& root, Checker& c, RunConfig& cfg, std::size_t k) {
  if (!root.contains("largedev")) return;
  const json& l = root["largedev"];
  if (!l.is_object()) {
    c.fail("/largedev", "expected an object");
    return;
  }
  for (const auto& [key, value] : l.items()) {
    const std::string ptr = "/largedev/" + key;
    if (key == "mode") {
      if (value == "montecarlo") cfg.largedev.montecarlo = true;
      else if (value == "exact") cfg.largedev.montecarlo = false;
      else c.fail(ptr, "expected \"exact\" or \"montecarlo\"");
    } else if (key == "samples") {
      const auto v = c.integer(value, ptr);
      if (v && *v < 1) c.fail(ptr, "samples must be >= 1");
      else if (v) cfg.largedev.samples = static_cast<std::size_t>(*v);
    } else if (key == "n") {
      const auto lo = value.contains("min") ? c.integer(value["min"], ptr + "/min") : std::nullopt;
      const auto hi = value.contains("max") ? c.integer(value["max"], ptr + "/max") : std::nullopt;
      if (!lo || !hi || *lo < 1 || *hi < *lo || *hi > 64) c.fail(ptr, "expected {min, max} with 1 <= min <= max <= 64");
      else cfg.largedev.n = {static_cast<int>(*lo), static_cast<int>(*hi)};
    } else if (key == "q") {
      if (!value.is_array() || value.size() != k) {
        c.fail(ptr, "expected an array of " + std::to_string(k) + " numbers");
        continue;
      }
      QVector q(k, 0.0);
      bool ok = true;
      for (std::size_t j = 0; j < k; ++j) {
        const auto v = c.number(value[j], ptr + "/" + std::to_string(j));
        ok = ok && v.has_value();
        if (v) q[j] = *v;
      }
      if (ok) cfg.largedev.q = q;
    } else {
      c.fail(ptr, "unknown key");
    }
  }
}

}  // namespace

std::string_view to_string(Task task) noexcept {
  switch (task) {
    case Task::moments: return "moments";
    case Task::exponents: return "exponents";
    case Task::spectrum: return "spectrum";
    case Task::gibbs: return "gibbs";
    case Task::largedev: return "largedev";
    case Task::verify: return "verify";
  }
  return "moments";
}

SchemaError::SchemaError(std::vector<SchemaIssue> issues)
    : Error(ErrorCode::SchemaError, join_issues(issues)), issues_(std::move(issues)) {}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults{
      {"oracle", 1e-9},          // slope estimates vs analytic τ
      {"bisection", 1e-4},       // critical exponent root search
      {"convexity", 1e-6},       // second differences of τ̂
      {"besicovitch", 1e-12},    // log-domain slack
      {"a1", 1e-12},             // Gibbs ratio vs 1
      {"cqn", 1e-12},            // C_{q,n} at n vs 2n
      {"cumulant_convexity", 1e-9},
      {"mc_sigma", 3.0},
      {"mc_fraction", 0.95},
      {"coarse", 0.1},           // coarse vs Legendre at bin centers
      {"coarse_upper", 0.05},    // coarse envelope above Legendre
  };
  return defaults;
}

bool RunConfig::has(Task task) const {
  return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

double RunConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

VectorMeasure RunConfig::build_measure() const {
  std::vector<MeasureComponent> components;
  for (const auto& m : measures) {
    if (m.kind == "multinomial")
      components.push_back(MeasureComponent::multinomial(m.base, m.weights));
    else
      components.push_back(MeasureComponent::empirical(m.atoms));
  }
  const int base = measures.front().kind == "multinomial" ? measures.front().base : 0;
  return VectorMeasure(std::move(components), base, std::max(depths.max + 2, VectorMeasure::kDefaultMaxDepth));
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::vector<SchemaIssue>{{"", std::string("invalid JSON: ") + e.what()}});
  }
  if (!root.is_object()) throw SchemaError(std::vector<SchemaIssue>{{"", "config must be a JSON object"}});

  Checker c;
  RunConfig cfg;
  static const std::set<std::string> known{"measures", "q_grid", "depths",     "tasks",
                                           "seed",     "xi",     "tolerances", "largedev"};
  for (const auto& [key, value] : root.items())
    if (!known.count(key)) c.fail("/" + key, "unknown key");

  parse_measures(root, c, cfg);
  const std::size_t k = root.contains("measures") && root["measures"].is_array() ? root["measures"].size() : 0;
  if (k > 0) parse_q_grid(root, c, cfg, k);
  else if (!root.contains("q_grid")) c.fail("/q_grid", "required");
  parse_depths(root, c, cfg);
  parse_tasks(root, c, cfg);
  parse_largedev(root, c, cfg, k);

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) c.fail("/seed", "expected a nonnegative 64-bit integer");
    else cfg.seed = root["seed"].get<std::uint64_t>();
  } else if (cfg.has(Task::largedev) && cfg.largedev.montecarlo) {
    c.fail("/seed", "required when largedev runs in montecarlo mode");
  }
  if (root.contains("xi")) {
    const auto xi = c.number(root["xi"], "/xi");
    if (xi && *xi < 1.0) c.fail("/xi", "xi must be >= 1");
    else if (xi) cfg.xi = *xi;
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) {
      c.fail("/tolerances", "expected an object of name: value");
    } else {
      for (const auto& [key, value] : t.items()) {
        const std::string ptr = "/tolerances/" + key;
        if (!default_tolerances().count(key)) {
          c.fail(ptr, "unknown tolerance");
          continue;
        }
        const auto v = c.number(value, ptr);
        if (v && !(*v > 0.0)) c.fail(ptr, "tolerance must be > 0");
        else if (v) cfg.tolerances[key] = *v;
      }
    }
  }
  const bool needs_multinomial = cfg.has(Task::gibbs) || cfg.has(Task::largedev);
  if (needs_multinomial)
    for (std::size_t i = 0; i < cfg.measures.size(); ++i)
      if (cfg.measures[i].kind != "multinomial")
        c.fail("/measures/" + std::to_string(i) + "/kind", "gibbs and largedev need multinomial components");

  if (!c.issues.empty()) throw SchemaError(std::move(c.issues));
  cfg.echo = root;
  return cfg;
}

}  // namespace mixfrac::cli
