#include "mixfrac/premeasure_dp.hpp"

#include <algorithm>
#include <cmath>

#include "mixfrac/format.hpp"
#include "mixfrac/moment_engine.hpp"
#include "mixfrac/numeric.hpp"
#include "mixfrac/parallel.hpp"

namespace mixfrac {

CascadeTree::CascadeTree(const VectorMeasure& vm, const QVector& q, int max_depth)
    : base_(vm.base()) {
  check_exponents(vm, q);
  if (max_depth < 0 || max_depth > vm.max_depth())
    throw Error(ErrorCode::BadArgument, "tree depth " + std::to_string(max_depth) + " outside [0, " +
                                            std::to_string(vm.max_depth()) + "]");
  terms_.resize(static_cast<std::size_t>(max_depth) + 1);
  for (int j = 0; j <= max_depth; ++j) {
    auto& level = terms_[static_cast<std::size_t>(j)];
    level.assign(static_cast<std::size_t>(cell_count(base_, j)), 0.0);
    for (std::size_t c = 0; c < vm.dimension(); ++c) {
      const auto lm = log_cell_masses(vm[c], base_, j);
      for (std::size_t i = 0; i < lm.size(); ++i) {
        if (level[i] == kNegInf) continue;
        level[i] = lm[i] == kNegInf ? kNegInf : level[i] + q[c] * lm[i];
      }
    }
  }
}

double CascadeTree::solve(double t, int depth, int min_depth, bool maximize,
                          std::span<const std::uint64_t> depth1_cells) const {
  if (depth < 0 || depth > max_depth())
    throw Error(ErrorCode::BadArgument, "DP depth " + std::to_string(depth) + " outside [0, " +
                                            std::to_string(max_depth()) + "]");
  if (min_depth < 0 || min_depth > depth)
    throw Error(ErrorCode::BadArgument, "min_depth must lie in [0, depth]");
  const double log_b = std::log(static_cast<double>(base_));
  const auto b = static_cast<std::size_t>(base_);

  auto weight = [&](int j, std::size_t i) {
    const double term = terms_[static_cast<std::size_t>(j)][i];
    return term == kNegInf ? kNegInf : term - t * j * log_b;
  };

  const auto& leaves = terms_[static_cast<std::size_t>(depth)];
  std::vector<double> cur(leaves.size());
  bool any = false;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    cur[i] = weight(depth, i);
    any = any || cur[i] != kNegInf;
  }
  if (!any)
    throw Error(ErrorCode::EmptySupport, "no joint-support cell at depth " + std::to_string(depth));

  auto restrict_level1 = [&](std::vector<double>& level) {
    if (depth1_cells.empty()) return;
    for (std::size_t i = 0; i < level.size(); ++i)
      if (std::find(depth1_cells.begin(), depth1_cells.end(), i) == depth1_cells.end())
        level[i] = kNegInf;
  };
  if (depth == 1) restrict_level1(cur);

  for (int j = depth - 1; j >= 0; --j) {
    std::vector<double> next(cur.size() / b);
    for (std::size_t i = 0; i < next.size(); ++i) {
      LogSumAccumulator acc;
      for (std::size_t d = 0; d < b; ++d) acc.add(cur[i * b + d]);
      const double below = acc.value();
      if (below == kNegInf || j < min_depth) {
        next[i] = below;
        continue;
      }
      const double own = weight(j, i);
      next[i] = maximize ? std::max(own, below) : std::min(own, below);
    }
    if (j == 1) restrict_level1(next);
    cur = std::move(next);
  }
  if (cur[0] == kNegInf)
    throw Error(ErrorCode::EmptySupport, "restricted tree has no joint-support cell");
  return cur[0];
}

double CascadeTree::cover(double t, int depth, int min_depth) const {
  return solve(t, depth, min_depth, false, {});
}

double CascadeTree::pack(double t, int depth, int min_depth) const {
  return solve(t, depth, min_depth, true, {});
}

double dp_cover_value(const WeightedTreeSpec& spec, int depth, int min_depth) {
  if (depth > spec.max_depth) throw Error(ErrorCode::BadArgument, "depth exceeds spec.max_depth");
  return CascadeTree(spec.vm, spec.q, depth).cover(spec.t, depth, min_depth);
}

double dp_pack_value(const WeightedTreeSpec& spec, int depth, int min_depth) {
  if (depth > spec.max_depth) throw Error(ErrorCode::BadArgument, "depth exceeds spec.max_depth");
  return CascadeTree(spec.vm, spec.q, depth).pack(spec.t, depth, min_depth);
}

std::string_view to_string(ExponentKind kind) noexcept {
  switch (kind) {
    case ExponentKind::hausdorff_b: return "hausdorff_b";
    case ExponentKind::packing_B: return "packing_B";
    case ExponentKind::prepacking_Lambda: return "prepacking_Lambda";
  }
  return "hausdorff_b";
}

ExponentKind exponent_kind_from_string(std::string_view name) {
  if (name == "hausdorff_b") return ExponentKind::hausdorff_b;
  if (name == "packing_B") return ExponentKind::packing_B;
  if (name == "prepacking_Lambda") return ExponentKind::prepacking_Lambda;
  throw Error(ErrorCode::BadArgument, "unknown exponent kind '" + std::string(name) + "'");
}

double dp_growth_rate(const CascadeTree& tree, double t, int depth, bool maximize) {
  if (depth < 2) throw Error(ErrorCode::BadArgument, "growth rate needs depth >= 2");
  const int min_depth = depth - depth / 2;
  return tree.solve(t, depth, min_depth, maximize, {}) -
         tree.solve(t, depth - 1, min_depth - 1, maximize, {});
}

CriticalExponent critical_exponent(const VectorMeasure& vm, const QVector& q, ExponentKind kind,
                                   const ExponentOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::BadArgument, "tolerance must be > 0");
  const CascadeTree tree(vm, q, options.depth);
  const bool maximize = kind != ExponentKind::hausdorff_b;
  auto g = [&](double t) { return dp_growth_rate(tree, t, options.depth, maximize); };

  double lo = options.t_min;
  double hi = options.t_max;
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0))
    throw Error(ErrorCode::NoBracket, "growth rate has no sign change on [" + format_double(lo) +
                                          ", " + format_double(hi) + "] for q = " + q.str());
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm > 0.0)
      lo = mid;
    else if (gm < 0.0)
      hi = mid;
    else
      lo = hi = mid;
  }
  CriticalExponent out;
  out.q = q;
  out.kind = kind;
  out.value = 0.5 * (lo + hi);
  // keep t_low < value < t_high even when the root was hit exactly
  out.t_low = std::min(lo, out.value - 0.25 * options.tol);
  out.t_high = std::max(hi, out.value + 0.25 * options.tol);
  out.depth_used = options.depth;
  return out;
}

std::vector<CriticalExponent> critical_exponents(const VectorMeasure& vm,
                                                 std::span<const QVector> q_grid,
                                                 std::span<const ExponentKind> kinds,
                                                 const ExponentOptions& options, unsigned threads) {
  std::vector<CriticalExponent> out(q_grid.size() * kinds.size());
  parallel_for(out.size(), threads, [&](std::size_t slot) {
    out[slot] = critical_exponent(vm, q_grid[slot / kinds.size()], kinds[slot % kinds.size()], options);
  });
  return out;
}

std::string exponents_to_csv(std::span<const CriticalExponent> exponents) {
  const std::size_t k = exponents.empty() ? 1 : exponents.front().q.size();
  std::vector<std::string> header;
  for (std::size_t j = 1; j <= k; ++j) header.push_back("q_" + std::to_string(j));
  for (const char* h : {"kind", "t_star", "t_low", "t_high", "depth"}) header.emplace_back(h);
  std::string out = csv_line(header);
  for (const auto& e : exponents) {
    std::vector<std::string> f;
    for (double v : e.q) f.push_back(format_double(v));
    f.emplace_back(to_string(e.kind));
    f.push_back(format_double(e.value));
    f.push_back(format_double(e.t_low));
    f.push_back(format_double(e.t_high));
    f.push_back(std::to_string(e.depth_used));
    out += csv_line(f);
  }
  return out;
}

BesicovitchReport besicovitch_check(const VectorMeasure& vm, const QVector& q, double t, int depth,
                                    double xi) {
  if (!(xi >= 1.0)) throw Error(ErrorCode::BadArgument, "Besicovitch constant must be >= 1");
  const CascadeTree tree(vm, q, depth);
  BesicovitchReport r;
  r.cover = tree.cover(t, depth);
  r.pack = tree.pack(t, depth);
  r.log_xi = std::log(xi);
  r.slack = r.log_xi + r.pack - r.cover;
  r.holds = r.slack >= -1e-12;
  return r;
}

AdditivityReport separated_additivity_check(const VectorMeasure& vm, const QVector& q, double t,
                                            int depth, std::array<std::uint64_t, 2> cells) {
  if (depth < 1) throw Error(ErrorCode::BadArgument, "additivity check needs depth >= 1");
  const auto b = static_cast<std::uint64_t>(vm.base());
  if (cells[0] == cells[1] || cells[0] >= b || cells[1] >= b)
    throw Error(ErrorCode::BadSplit, "split must name two distinct depth-1 cells");
  const CascadeTree tree(vm, q, depth);
  AdditivityReport r;
  r.cells = cells;
  for (std::size_t s = 0; s < 2; ++s) {
    const std::uint64_t one[] = {cells[s]};
    try {
      r.parts[s] = tree.solve(t, depth, 1, true, one);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptySupport) throw;
      throw Error(ErrorCode::BadSplit, "subtree of depth-1 cell " + std::to_string(cells[s]) +
                                           " has empty support");
    }
  }
  r.union_value = tree.solve(t, depth, 1, true, cells);
  r.sum_value = log_add(r.parts[0], r.parts[1]);
  r.holds = std::abs(r.union_value - r.sum_value) <= 1e-12 * std::max(1.0, std::abs(r.sum_value));
  return r;
}

}  // namespace mixfrac
