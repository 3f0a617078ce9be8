#include "mixfrac_cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "mixfrac/format.hpp"
#include "mixfrac/moment_engine.hpp"
#include "mixfrac/premeasure_dp.hpp"
#include "mixfrac/spectra.hpp"

namespace mixfrac::cli {
namespace {

using json = nlohmann::ordered_json;
constexpr double kInf = std::numeric_limits<double>::infinity();

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
  out << body;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + (dir / name).string());
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<long long> grid_key(const QVector& q) {
  std::vector<long long> key;
  for (double v : q) key.push_back(std::llround(v * 1e9));
  return key;
}

// Smallest positive spacing per axis.
QVector axis_steps(const std::vector<QVector>& grid) {
  const std::size_t k = grid.front().size();
  QVector steps(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> c;
    for (const auto& q : grid) c.push_back(q[j]);
    std::sort(c.begin(), c.end());
    double best = kInf;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i] - c[i - 1] > 1e-12) best = std::min(best, c[i] - c[i - 1]);
    steps[j] = best == kInf ? 0.0 : best;
  }
  return steps;
}

// Axis directions plus the two diagonals of every axis pair, scaled by the
// per-axis step; zero-step axes are dropped.
std::vector<QVector> directions(const QVector& steps) {
  const std::size_t k = steps.size();
  std::vector<QVector> out;
  for (std::size_t i = 0; i < k; ++i) {
    if (steps[i] == 0.0) continue;
    QVector d(k, 0.0);
    d[i] = steps[i];
    out.push_back(d);
    for (std::size_t j = i + 1; j < k; ++j) {
      if (steps[j] == 0.0) continue;
      QVector p = d, m = d;
      p[j] = steps[j];
      m[j] = -steps[j];
      out.push_back(p);
      out.push_back(m);
    }
  }
  return out;
}

QVector add(const QVector& a, const QVector& b, double s) {
  QVector out = a;
  for (std::size_t j = 0; j < a.size(); ++j) out[j] += s * b[j];
  return out;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, const RunOptions& opt)
      : cfg_(cfg), opt_(opt), vm_(cfg.build_measure()), seed_(opt.seed ? *opt.seed : cfg.seed.value_or(0)) {
    report_.command = std::string(to_string(opt.command));
    report_.config = cfg.echo;
    if (opt.seed) report_.config["seed"] = *opt.seed;
  }

  RunReport execute() {
    std::filesystem::create_directories(opt_.out_dir);
    if (opt_.command == Command::oracle_compare) {
      step("oracle-compare", [&] { oracle_compare(); });
    } else {
      for (Task t : cfg_.tasks) {
        if (opt_.command == Command::verify && t == Task::verify) continue;
        run_task(t);
      }
      if (opt_.command == Command::verify) run_task(Task::verify);
    }
    write_file(opt_.out_dir, "report.json", report_.to_json().dump(2) + "\n");
    json timings = json::object();
    for (const auto& [name, seconds] : report_.timings) timings[name] = seconds;
    write_file(opt_.out_dir, "timings.json", timings.dump(2) + "\n");
    return report_;
  }

 private:
  void run_task(Task t) {
    switch (t) {
      case Task::moments: step("moments", [&] { moments(); }); break;
      case Task::exponents: step("exponents", [&] { exponents(); }); break;
      case Task::spectrum: step("spectrum", [&] { spectrum(); }); break;
      case Task::gibbs: step("gibbs", [&] { gibbs(); }); break;
      case Task::largedev: step("largedev", [&] { largedev(); }); break;
      case Task::verify: step("verify", [&] { verify(); }); break;
    }
  }

  void step(const std::string& name, const std::function<void()>& body) {
    TaskResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    const std::size_t first_check = report_.checks.size();
    current_outputs_.clear();
    try {
      body();
      r.status = "pass";
      for (std::size_t i = first_check; i < report_.checks.size(); ++i)
        if (report_.checks[i].status == "fail") r.status = "fail";
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      r.status = "fail";
      r.error = e.what();
    } catch (const std::exception& e) {
      r.status = "fail";
      r.error = e.what();
    }
    r.outputs = current_outputs_;
    report_.tasks.push_back(std::move(r));
    report_.timings[name] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void emit(const std::string& name, const std::string& body) {
    write_file(opt_.out_dir, name, body);
    current_outputs_.push_back(name);
  }

  // `upper` true: pass when statistic <= threshold; false: statistic >= threshold.
  void check(const std::string& name, double statistic, double threshold, bool upper = true) {
    const bool ok = upper ? statistic <= threshold : statistic >= threshold;
    report_.checks.push_back({name, ok ? "pass" : "fail", statistic, threshold});
  }

  void skip(const std::string& name) { report_.checks.push_back({name, "skipped", 0.0, 0.0}); }

  int exponent_depth() const { return std::clamp(cfg_.depths.max, 2, 14); }

  const MomentTable& table() {
    if (!table_) {
      const MomentKind kinds[] = {MomentKind::cover, MomentKind::pack, MomentKind::integral};
      table_ = build_moment_table(vm_, cfg_.q_grid, cfg_.depths, kinds, opt_.threads);
    }
    return *table_;
  }

  const std::vector<CriticalExponent>& exponent_list() {
    if (!exponents_) {
      const ExponentKind kinds[] = {ExponentKind::hausdorff_b, ExponentKind::packing_B,
                                    ExponentKind::prepacking_Lambda};
      ExponentOptions o;
      o.tol = cfg_.tolerance("bisection");
      o.depth = exponent_depth();
      exponents_ = critical_exponents(vm_, cfg_.q_grid, kinds, o, opt_.threads);
    }
    return *exponents_;
  }

  SpectrumCurve exponent_curve(ExponentKind kind) {
    auto curve = curve_from_exponents(exponent_list(), kind, vm_.base());
    compute_gradients(curve);
    return curve;
  }

  void moments() { emit("moments.csv", table().to_csv()); }

  void exponents() { emit("tau.csv", exponents_to_csv(exponent_list())); }

  void spectrum() {
    for (CurveKind kind : {CurveKind::Lbar, CurveKind::Llow, CurveKind::Cbar, CurveKind::Clow,
                           CurveKind::Ibar, CurveKind::Ilow}) {
      auto curve = curve_from_table(table(), cfg_.q_grid, kind);
      compute_gradients(curve);
      emit("curve_" + std::string(to_string(kind)) + ".csv", curve.to_csv());
    }
    for (ExponentKind kind : {ExponentKind::hausdorff_b, ExponentKind::packing_B,
                              ExponentKind::prepacking_Lambda}) {
      const auto curve = exponent_curve(kind);
      emit("curve_" + std::string(to_string(curve.kind)) + ".csv", curve.to_csv());
    }
    const auto f = legendre_transform(exponent_curve(ExponentKind::packing_B));
    check("legendre_hull_distance", f.hull_distance, kHullTolerance);
    emit("spectrum.csv", f.to_csv());

    if (cfg_.depths.max >= 4) {
      const auto coarse = coarse_spectrum(vm_, cfg_.depths.max, 0.05);
      std::vector<std::string> header;
      for (std::size_t j = 1; j <= vm_.dimension(); ++j) header.push_back("alpha_" + std::to_string(j));
      header.emplace_back("count");
      header.emplace_back("value");
      std::string csv = csv_line(header);
      for (const auto& bin : coarse.bins) {
        std::vector<std::string> row;
        for (double c : bin.center) row.push_back(format_double(c));
        row.push_back(std::to_string(bin.count));
        row.push_back(format_double(bin.value));
        csv += csv_line(row);
      }
      emit("coarse.csv", csv);
    }
  }

  void gibbs() {
    const std::size_t k = vm_.dimension();
    const int b = vm_.base();
    const DepthRange a1_depths{cfg_.depths.min, std::min(cfg_.depths.max, 16)};
    const int n = std::min(cfg_.depths.min, 10);
    std::vector<std::string> header;
    for (std::size_t j = 1; j <= k; ++j) header.push_back("q_" + std::to_string(j));
    header.emplace_back("t_q");
    for (int i = 0; i < b; ++i) header.push_back("g_" + std::to_string(i));
    for (const char* h : {"k_lower", "k_upper", "c_n", "c_2n"}) header.emplace_back(h);
    for (std::size_t j = 1; j <= k; ++j) header.push_back("grad_c_" + std::to_string(j));
    std::string csv = csv_line(header);
    double worst_a1 = 0.0, worst_cqn = 0.0;
    const QVector ones(k, 1.0);
    for (const auto& q : cfg_.q_grid) {
      const auto g = build_gibbs(vm_, q);
      const auto a1 = a1_check(vm_, g, a1_depths);
      const double c1 = c_qn(vm_, g, ones, n);
      const double c2 = c_qn(vm_, g, ones, 2 * n);
      const auto grad = grad_c(vm_, g);
      worst_a1 = std::max({worst_a1, std::abs(a1.k_lower - 1.0), std::abs(a1.k_upper - 1.0)});
      worst_cqn = std::max(worst_cqn, std::abs(c1 - c2));
      std::vector<std::string> row;
      for (double v : q) row.push_back(format_double(v));
      row.push_back(format_double(g.t_q));
      for (double w : g.nu.weights()) row.push_back(format_double(w));
      for (double v : {a1.k_lower, a1.k_upper, c1, c2}) row.push_back(format_double(v));
      for (std::size_t j = 0; j < k; ++j) row.push_back(format_double(0.5 * (grad.plus[j] + grad.minus[j])));
      csv += csv_line(row);
    }
    emit("gibbs.csv", csv);
    check("gibbs_a1_exact", worst_a1, cfg_.tolerance("a1"));
    check("gibbs_cqn_depth_independent", worst_cqn, cfg_.tolerance("cqn"));
  }

  void largedev() {
    const std::size_t k = vm_.dimension();
    const QVector q = cfg_.largedev.q.value_or(QVector(k, 0.0));
    const auto g = build_gibbs(vm_, q);

    // convexity of the exact cumulant on [-3, 3]^k, step 0.5
    std::vector<std::vector<double>> axes(k);
    std::vector<QVector> tgrid{QVector{}};
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<QVector> next;
      for (const auto& prefix : tgrid)
        for (int i = -6; i <= 6; ++i) {
          std::vector<double> v(prefix.begin(), prefix.end());
          v.push_back(0.5 * i);
          next.emplace_back(std::move(v));
        }
      tgrid = std::move(next);
    }
    const auto dirs = directions(QVector(k, 0.5));
    double min_second = kInf;
    for (const auto& t : tgrid)
      for (const auto& d : dirs) {
        const QVector lo = add(t, d, -1.0), hi = add(t, d, 1.0);
        if (std::any_of(lo.begin(), lo.end(), [](double v) { return v < -3.0 - 1e-12; }) ||
            std::any_of(hi.begin(), hi.end(), [](double v) { return v > 3.0 + 1e-12; }) ||
            std::any_of(lo.begin(), lo.end(), [](double v) { return v > 3.0 + 1e-12; }) ||
            std::any_of(hi.begin(), hi.end(), [](double v) { return v < -3.0 - 1e-12; }))
          continue;
        const double s = gibbs_cumulant(vm_, g, lo) - 2.0 * gibbs_cumulant(vm_, g, t) +
                         gibbs_cumulant(vm_, g, hi);
        min_second = std::min(min_second, s);
      }
    check("ld_cumulant_convex", min_second, -cfg_.tolerance("cumulant_convexity"), false);

    const QVector zero(k, 0.0);
    const auto grad0 = exact_cumulant_gradient(vm_, g, zero);
    QVector alpha = grad0.plus(0.2);
    const DepthRange decay_n{8, 16};
    const auto decay = ld_markov_decay_check(vm_, g, zero, alpha, decay_n);
    for (auto& c : decay.claims()) report_.claims.push_back(std::move(c));
    check("ld_markov_negative", decay.negative ? 1.0 : 0.0, 1.0, false);
    check("ld_markov_decreasing", decay.decreasing ? 1.0 : 0.0, 1.0, false);
    check("ld_markov_chernoff_bounded", decay.chernoff_bounded ? 1.0 : 0.0, 1.0, false);

    if (!cfg_.largedev.montecarlo) {
      skip("ld_mc_consistency");
      skip("ld_bounds_mean");
      return;
    }
    const std::size_t samples = cfg_.largedev.samples;
    std::mt19937_64 picks(seed_);
    const double sigma = cfg_.tolerance("mc_sigma");
    int within = 0;
    constexpr int kPairs = 50;
    std::string csv = csv_line({"pair", "n", "exact", "estimate", "std_error"});
    for (int p = 0; p < kPairs; ++p) {
      QVector t(k, 0.0);
      for (std::size_t j = 0; j < k; ++j) t[j] = uniform(picks, -2.0, 2.0);
      const int n = 4 + static_cast<int>(picks() % 9);
      const auto exact = ld_cumulant(vm_, g, t, n, CumulantMode::exact);
      const auto mc = ld_cumulant(vm_, g, t, n, CumulantMode::montecarlo, samples,
                                  seed_ + static_cast<std::uint64_t>(p) + 1, opt_.threads);
      if (std::abs(mc.value - exact.value) <= sigma * mc.std_error) ++within;
      csv += csv_line({std::to_string(p), std::to_string(n), format_double(exact.value),
                       format_double(mc.value), format_double(mc.std_error)});
    }
    emit("largedev_mc.csv", csv);
    check("ld_mc_consistency", static_cast<double>(within) / kPairs, cfg_.tolerance("mc_fraction"), false);

    const auto bounds = ld_bounds_verify(vm_, g, cfg_.largedev.n, samples, seed_, opt_.threads);
    for (auto& c : bounds.claims()) report_.claims.push_back(std::move(c));
    check("ld_bounds_mean", bounds.mean_converges ? 1.0 : 0.0, 1.0, false);
    check("ld_bounds_violations_decay", bounds.violations_decay ? 1.0 : 0.0, 1.0, false);
  }

  void oracle_compare() {
    if (!vm_.all_multinomial()) throw Error(ErrorCode::NotMultinomial, "oracle-compare needs multinomial components");
    const std::size_t k = vm_.dimension();
    std::vector<std::string> header;
    for (std::size_t j = 1; j <= k; ++j) header.push_back("q_" + std::to_string(j));
    for (const char* h : {"tau", "slope_lower", "slope_upper", "slope_lsq", "t_b", "t_B", "t_Lambda"})
      header.emplace_back(h);
    std::string csv = csv_line(header);
    double worst_slope = 0.0, worst_dp = 0.0;
    const auto& ex = exponent_list();
    for (std::size_t i = 0; i < cfg_.q_grid.size(); ++i) {
      const auto& q = cfg_.q_grid[i];
      const double tau = analytic_tau_multinomial(vm_, q);
      const auto s = slope_estimates(table(), q, MomentKind::cover);
      std::vector<std::string> row;
      for (double v : q) row.push_back(format_double(v));
      for (double v : {tau, s.lower, s.upper, s.lsq}) row.push_back(format_double(v));
      worst_slope = std::max({worst_slope, std::abs(s.lower - tau), std::abs(s.upper - tau)});
      for (std::size_t kind = 0; kind < 3; ++kind) {
        const double t = ex[i * 3 + kind].value;
        row.push_back(format_double(t));
        worst_dp = std::max(worst_dp, std::abs(t - tau));
      }
      csv += csv_line(row);
    }
    emit("oracle.csv", csv);
    check("oracle_slopes", worst_slope, cfg_.tolerance("oracle"));
    check("oracle_dp_exponents", worst_dp, cfg_.tolerance("bisection"));
  }

  void verify() {
    const std::size_t k = vm_.dimension();
    const bool multinomial = vm_.all_multinomial();
    const auto& grid = cfg_.q_grid;
    const QVector steps = axis_steps(grid);
    std::map<std::vector<long long>, std::size_t> index;
    for (std::size_t i = 0; i < grid.size(); ++i) index[grid_key(grid[i])] = i;
    auto lookup = [&](const QVector& q) -> std::optional<std::size_t> {
      const auto it = index.find(grid_key(q));
      if (it == index.end()) return std::nullopt;
      return it->second;
    };

    const bool ladder = cfg_.depths.size() >= 3;
    std::vector<SlopeEstimate> cover, pack, integral;
    if (ladder)
      for (const auto& q : grid) {
        cover.push_back(slope_estimates(table(), q, MomentKind::cover));
        pack.push_back(slope_estimates(table(), q, MomentKind::pack));
        integral.push_back(slope_estimates(table(), q, MomentKind::integral));
      }

    // oracle agreement
    if (multinomial && ladder) {
      double worst = 0.0, worst_dp = 0.0;
      const auto& ex = exponent_list();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double tau = analytic_tau_multinomial(vm_, grid[i]);
        worst = std::max({worst, std::abs(cover[i].lower - tau), std::abs(cover[i].upper - tau)});
        for (std::size_t kind = 0; kind < 3; ++kind)
          worst_dp = std::max(worst_dp, std::abs(ex[i * 3 + kind].value - tau));
      }
      check("oracle_slopes", worst, cfg_.tolerance("oracle"));
      check("oracle_dp_exponents", worst_dp, cfg_.tolerance("bisection"));
    } else {
      skip("oracle_slopes");
      skip("oracle_dp_exponents");
    }

    // unit vectors
    if (cfg_.depths.size() >= 3) {
      std::vector<QVector> units;
      for (std::size_t j = 0; j < k; ++j) units.push_back(QVector::unit(k, j));
      const MomentKind kinds[] = {MomentKind::cover};
      const auto t = build_moment_table(vm_, units, cfg_.depths, kinds, opt_.threads);
      double worst = 0.0;
      for (const auto& u : units) {
        const auto s = slope_estimates(t, u, MomentKind::cover);
        worst = std::max({worst, std::abs(s.lower), std::abs(s.upper)});
      }
      check("unit_vector_zeros", worst, cfg_.tolerance("oracle"));
    } else {
      skip("unit_vector_zeros");
    }

    // convexity, monotonicity and sign pattern of the slope curve
    if (ladder) {
      double min_second = kInf, max_rise = -kInf;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (const auto& d : directions(steps)) {
          const auto lo = lookup(add(grid[i], d, -1.0));
          const auto hi = lookup(add(grid[i], d, 1.0));
          if (lo && hi) min_second = std::min(min_second, cover[*lo].lsq - 2 * cover[i].lsq + cover[*hi].lsq);
        }
        for (std::size_t j = 0; j < k; ++j) {
          if (steps[j] == 0.0) continue;
          if (const auto up = lookup(add(grid[i], QVector::unit(k, j), steps[j])))
            max_rise = std::max(max_rise, cover[*up].lsq - cover[i].lsq);
        }
      }
      if (min_second == kInf) skip("tau_convexity");
      else check("tau_convexity", min_second, -cfg_.tolerance("convexity"), false);
      if (max_rise == -kInf) skip("tau_monotone");
      else check("tau_monotone", max_rise, cfg_.tolerance("convexity"));

      double worst_sign = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& q = grid[i];
        if (std::all_of(q.begin(), q.end(), [](double v) { return v < 1.0; }))
          worst_sign = std::max(worst_sign, -cover[i].lsq);
        if (std::all_of(q.begin(), q.end(), [](double v) { return v > 1.0; }))
          worst_sign = std::max(worst_sign, cover[i].lsq);
      }
      check("tau_sign_pattern", worst_sign, cfg_.tolerance("convexity"));

      // Rényi/packing bridge and L <= C
      if (multinomial) {
        std::vector<QVector> shifted;
        for (const auto& q : grid) shifted.push_back(q.plus(1.0));
        const MomentKind kinds[] = {MomentKind::pack};
        const auto t = build_moment_table(vm_, shifted, cfg_.depths, kinds, opt_.threads);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto s = slope_estimates(t, shifted[i], MomentKind::pack);
          worst = std::max(worst, std::abs(integral[i].upper - s.upper));
        }
        check("renyi_packing_bridge", worst, cfg_.tolerance("oracle"));
      } else {
        skip("renyi_packing_bridge");
      }
      int violations = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        violations += cover[i].lower > pack[i].lower + 1e-12;
        violations += cover[i].upper > pack[i].upper + 1e-12;
      }
      check("L_le_C", violations, 0.0);
    } else {
      for (const char* n : {"tau_convexity", "tau_monotone", "tau_sign_pattern", "renyi_packing_bridge", "L_le_C"})
        skip(n);
    }

    // Besicovitch inequality over a seeded sweep
    {
      std::mt19937_64 rng(seed_ ^ 0xB35C0F1ULL);
      const int depth = std::min(cfg_.depths.max, 10);
      int violations = 0;
      for (int s = 0; s < 100; ++s) {
        QVector q(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) q[j] = uniform(rng, -3.0, 3.0);
        const double t = uniform(rng, -2.0, 2.0);
        const auto r = besicovitch_check(vm_, q, t, depth, cfg_.xi);
        violations += r.slack < -cfg_.tolerance("besicovitch");
      }
      check("besicovitch", violations, 0.0);
    }

    if (!multinomial) {
      for (const char* n : {"legendre_duality", "coarse_upper", "coarse_agreement", "level_set_bound",
                            "level_set_empty", "gibbs_a1_exact", "gibbs_cqn_depth_independent"})
        skip(n);
      return;
    }

    // Legendre duality at interior grid points
    const auto curve_B = exponent_curve(ExponentKind::packing_B);
    const auto curve_b = exponent_curve(ExponentKind::hausdorff_b);
    double step = kInf;
    for (double s : steps)
      if (s > 0.0) step = std::min(step, s);
    std::vector<QVector> alphas;
    std::vector<std::size_t> at;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!curve_B.interior[i]) continue;
      QVector a(k, 0.0);
      for (std::size_t j = 0; j < k; ++j) a[j] = -curve_B.gradients[i][j];
      alphas.push_back(a);
      at.push_back(i);
    }
    if (alphas.empty() || step == kInf) {
      skip("legendre_duality");
      skip("level_set_bound");
    } else {
      const auto f = legendre_transform(curve_B, alphas);
      double worst = 0.0;
      for (std::size_t s = 0; s < alphas.size(); ++s) {
        const double tau = analytic_tau_multinomial(vm_, grid[at[s]]);
        worst = std::max(worst, std::abs(f.f_values[s] - (dot(alphas[s], grid[at[s]]) + tau)));
      }
      check("legendre_duality", worst, 2.0 * step);

      double worst_gap = -kInf;
      for (std::size_t s = 0; s < alphas.size(); ++s) {
        if (std::any_of(alphas[s].begin(), alphas[s].end(), [](double v) { return v < 0.0; })) continue;
        const auto bound = level_set_upper_bound(curve_b, curve_B, alphas[s]);
        worst_gap = std::max(worst_gap, f.f_values[s] - step - bound.dim_bound);
      }
      if (worst_gap == -kInf) skip("level_set_bound");
      else check("level_set_bound", worst_gap, 0.0);
    }

    // coarse vs Legendre for base-2 binomials
    if (k == 1 && vm_.base() == 2 && step != kInf) {
      const int depth = std::clamp(cfg_.depths.max, 12, 20);
      const auto coarse = coarse_spectrum(vm_, depth, 0.05);
      std::vector<QVector> centers;
      for (const auto& bin : coarse.bins) centers.push_back(bin.center);
      const auto f = legendre_transform(curve_B, centers);
      double above = -kInf, gap = 0.0;
      for (std::size_t s = 0; s < centers.size(); ++s) {
        above = std::max(above, coarse.bins[s].value - f.f_values[s]);
        if (f.in_domain[s]) gap = std::max(gap, std::abs(coarse.bins[s].value - f.f_values[s]));
      }
      check("coarse_upper", above, cfg_.tolerance("coarse_upper"));
      check("coarse_agreement", gap, cfg_.tolerance("coarse"));

      const auto w = vm_[0].weights();
      double a_min = kInf, a_max = 0.0;
      for (double p : w) {
        if (p <= 0.0) continue;
        a_min = std::min(a_min, -std::log2(p));
        a_max = std::max(a_max, -std::log2(p));
      }
      const bool wide = std::any_of(grid.begin(), grid.end(), [](const QVector& q) { return q[0] > 1.0; }) &&
                        std::any_of(grid.begin(), grid.end(), [](const QVector& q) { return q[0] < 0.0; });
      if (wide) {
        int missed = 0;
        for (double a : {0.0, a_max + 0.5}) missed += !level_set_upper_bound(curve_b, curve_B, QVector{a}).empty_flag;
        check("level_set_empty", missed, 0.0);
      } else {
        skip("level_set_empty");
      }
    } else {
      skip("coarse_upper");
      skip("coarse_agreement");
      skip("level_set_empty");
    }

    // Gibbs identities, unless the gibbs task already reported them
    if (cfg_.has(Task::gibbs)) return;
    double worst_a1 = 0.0, worst_cqn = 0.0;
    const QVector ones(k, 1.0);
    const int n = std::min(cfg_.depths.min, 10);
    for (const auto& q : grid) {
      const auto g = build_gibbs(vm_, q);
      const auto a1 = a1_check(vm_, g, {cfg_.depths.min, std::min(cfg_.depths.max, 12)});
      worst_a1 = std::max({worst_a1, std::abs(a1.k_lower - 1.0), std::abs(a1.k_upper - 1.0)});
      worst_cqn = std::max(worst_cqn, std::abs(c_qn(vm_, g, ones, n) - c_qn(vm_, g, ones, 2 * n)));
    }
    check("gibbs_a1_exact", worst_a1, cfg_.tolerance("a1"));
    check("gibbs_cqn_depth_independent", worst_cqn, cfg_.tolerance("cqn"));
  }

  const RunConfig& cfg_;
  const RunOptions& opt_;
  VectorMeasure vm_;
  std::uint64_t seed_;
  RunReport report_;
  std::vector<std::string> current_outputs_;
  std::optional<MomentTable> table_;
  std::optional<std::vector<CriticalExponent>> exponents_;
};

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::analyze: return "analyze";
    case Command::verify: return "verify";
    case Command::oracle_compare: return "oracle-compare";
  }
  return "analyze";
}

bool RunReport::all_pass() const {
  return std::none_of(tasks.begin(), tasks.end(), [](const TaskResult& t) { return t.status == "fail"; }) &&
         std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "fail"; });
}

json RunReport::to_json() const {
  json out;
  out["command"] = command;
  out["config"] = config;
  json tasks_json = json::array();
  for (const auto& t : tasks) {
    json j;
    j["name"] = t.name;
    j["status"] = t.status;
    j["outputs"] = t.outputs;
    if (!t.error.empty()) j["error"] = t.error;
    tasks_json.push_back(std::move(j));
  }
  out["tasks"] = std::move(tasks_json);
  json checks_json = json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name}, {"status", c.status}, {"statistic", c.statistic},
                           {"threshold", c.threshold}});
  out["checks"] = std::move(checks_json);
  json claims_json = json::array();
  for (const auto& c : claims) {
    json j;
    j["claim"] = c.claim;
    j["n"] = c.n;
    // JSON has no infinities; an empty tail event is reported as null
    if (std::isfinite(c.statistic)) j["statistic"] = c.statistic;
    else j["statistic"] = nullptr;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    claims_json.push_back(std::move(j));
  }
  out["claims"] = std::move(claims_json);
  out["all_pass"] = all_pass();
  return out;
}

RunReport run(const RunConfig& config, const RunOptions& options) {
  return Runner(config, options).execute();
}

int exit_code(const RunReport& report) { return report.all_pass() ? 0 : 1; }

}  // namespace mixfrac::cli
