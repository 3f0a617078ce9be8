#include "mixfrac/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mixfrac/convex_envelope.hpp"
#include "mixfrac/format.hpp"
#include "mixfrac/numeric.hpp"

namespace mixfrac {

std::string_view to_string(CurveKind kind) noexcept {
  switch (kind) {
    case CurveKind::b: return "b";
    case CurveKind::B: return "B";
    case CurveKind::Lambda: return "Lambda";
    case CurveKind::Cbar: return "Cbar";
    case CurveKind::Clow: return "Clow";
    case CurveKind::Lbar: return "Lbar";
    case CurveKind::Llow: return "Llow";
    case CurveKind::Ibar: return "Ibar";
    case CurveKind::Ilow: return "Ilow";
  }
  return "B";
}

std::size_t SpectrumCurve::find(const QVector& q) const {
  const auto it = std::find(q_grid.begin(), q_grid.end(), q);
  return it == q_grid.end() ? npos : static_cast<std::size_t>(it - q_grid.begin());
}

std::string SpectrumCurve::to_csv() const {
  SpectrumCurve filled = *this;
  if (filled.gradients.size() != filled.q_grid.size()) compute_gradients(filled);
  const std::size_t k = std::max<std::size_t>(dimension(), 1);
  std::vector<std::string> header;
  for (std::size_t j = 1; j <= k; ++j) header.push_back("q_" + std::to_string(j));
  header.emplace_back("value");
  for (std::size_t j = 1; j <= k; ++j) header.push_back("grad_" + std::to_string(j));
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    std::vector<std::string> f;
    for (double v : q_grid[i]) f.push_back(format_double(v));
    f.push_back(format_double(values[i]));
    for (double g : filled.gradients[i]) f.push_back(format_double(g));
    out += csv_line(f);
  }
  return out;
}

SlopeEstimate slope_estimates(const MomentTable& table, const QVector& q, MomentKind kind) {
  const auto rows = table.series(q, kind);
  if (rows.size() < 3)
    throw Error(ErrorCode::InsufficientDepths,
                "slope estimates need >= 3 depths for q = " + q.str() + " (" +
                    std::string(to_string(kind)) + "), have " + std::to_string(rows.size()));
  const double log_b = std::log(static_cast<double>(table.base()));
  std::vector<double> x, y;
  for (const auto* r : rows) {
    x.push_back(r->depth * log_b);
    y.push_back(r->log_value);
  }
  SlopeEstimate out;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    out.lower = std::min(out.lower, s);
    out.upper = std::max(out.upper, s);
  }
  out.lsq = lsq_slope(x, y);
  return out;
}

double analytic_tau_multinomial(const VectorMeasure& vm, const QVector& q) {
  if (!vm.all_multinomial())
    throw Error(ErrorCode::NotMultinomial, "analytic τ needs multinomial components");
  if (q.size() != vm.dimension())
    throw Error(ErrorCode::DimensionMismatch, "exponent vector does not match measure dimension");
  const int b = vm.base();
  LogSumAccumulator acc;
  for (int i = 0; i < b; ++i) {
    double term = 0.0;
    bool zero = false;
    for (std::size_t j = 0; j < vm.dimension(); ++j) {
      const double p = vm[j].weights()[static_cast<std::size_t>(i)];
      if (p == 0.0) {
        if (q[j] < 0.0)
          throw Error(ErrorCode::ZeroWeightWithNegativeQ,
                      "component " + std::to_string(j + 1) + " has a zero weight and q < 0");
        zero = true;
        continue;
      }
      term += q[j] * std::log(p);
    }
    if (!zero) acc.add(term);
  }
  if (acc.empty()) throw Error(ErrorCode::EmptySupport, "no digit carries mass in every component");
  return acc.value() / std::log(static_cast<double>(b));
}

SpectrumCurve curve_from_table(const MomentTable& table, std::span<const QVector> q_grid,
                               CurveKind kind) {
  MomentKind source = MomentKind::cover;
  bool upper = true;
  switch (kind) {
    case CurveKind::Lbar: source = MomentKind::cover; upper = true; break;
    case CurveKind::Llow: source = MomentKind::cover; upper = false; break;
    case CurveKind::Cbar: source = MomentKind::pack; upper = true; break;
    case CurveKind::Clow: source = MomentKind::pack; upper = false; break;
    case CurveKind::Ibar: source = MomentKind::integral; upper = true; break;
    case CurveKind::Ilow: source = MomentKind::integral; upper = false; break;
    default:
      throw Error(ErrorCode::BadArgument,
                  "curve kind " + std::string(to_string(kind)) + " is not built from moments");
  }
  SpectrumCurve curve;
  curve.kind = kind;
  curve.base = table.base();
  for (const auto& q : q_grid) {
    const auto s = slope_estimates(table, q, source);
    curve.q_grid.push_back(q);
    curve.values.push_back(upper ? s.upper : s.lower);
  }
  return curve;
}

SpectrumCurve curve_from_exponents(std::span<const CriticalExponent> exponents, ExponentKind kind,
                                   int base) {
  SpectrumCurve curve;
  curve.base = base;
  switch (kind) {
    case ExponentKind::hausdorff_b: curve.kind = CurveKind::b; break;
    case ExponentKind::packing_B: curve.kind = CurveKind::B; break;
    case ExponentKind::prepacking_Lambda: curve.kind = CurveKind::Lambda; break;
  }
  for (const auto& e : exponents) {
    if (e.kind != kind) continue;
    curve.q_grid.push_back(e.q);
    curve.values.push_back(e.value);
  }
  return curve;
}

void compute_gradients(SpectrumCurve& curve) {
  const std::size_t n = curve.q_grid.size();
  const std::size_t k = curve.dimension();
  curve.gradients.assign(n, QVector(k, 0.0));
  curve.interior.assign(n, n > 0);
  for (std::size_t axis = 0; axis < k; ++axis) {
    // grid lines parallel to `axis`, keyed by the other coordinates
    std::map<std::vector<double>, std::vector<std::size_t>> lines;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> key;
      for (std::size_t j = 0; j < k; ++j)
        if (j != axis) key.push_back(curve.q_grid[i][j]);
      lines[key].push_back(i);
    }
    for (auto& [key, idx] : lines) {
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return curve.q_grid[a][axis] < curve.q_grid[b][axis];
      });
      for (std::size_t p = 0; p < idx.size(); ++p) {
        const std::size_t lo = p == 0 ? p : p - 1;
        const std::size_t hi = p + 1 == idx.size() ? p : p + 1;
        if (lo == p || hi == p) curve.interior[idx[p]] = false;
        if (lo == hi) continue;
        const double dx = curve.q_grid[idx[hi]][axis] - curve.q_grid[idx[lo]][axis];
        curve.gradients[idx[p]][axis] = (curve.values[idx[hi]] - curve.values[idx[lo]]) / dx;
      }
    }
  }
}

namespace {

void require_legendre_kind(const SpectrumCurve& curve) {
  if (curve.kind != CurveKind::B && curve.kind != CurveKind::Lambda)
    throw Error(ErrorCode::BadArgument, "Legendre transform needs a B or Lambda curve, got " +
                                            std::string(to_string(curve.kind)));
  if (curve.q_grid.empty() || curve.q_grid.size() != curve.values.size())
    throw Error(ErrorCode::BadArgument, "curve needs one value per grid point");
}

void domain_box(const SpectrumCurve& curve, LegendreSpectrum& out) {
  const std::size_t k = curve.dimension();
  out.dom_low = QVector(k, std::numeric_limits<double>::infinity());
  out.dom_high = QVector(k, -std::numeric_limits<double>::infinity());
  bool any = false;
  for (std::size_t i = 0; i < curve.q_grid.size(); ++i) {
    if (!curve.interior[i]) continue;
    any = true;
    for (std::size_t j = 0; j < k; ++j) {
      out.dom_low[j] = std::min(out.dom_low[j], -curve.gradients[i][j]);
      out.dom_high[j] = std::max(out.dom_high[j], -curve.gradients[i][j]);
    }
  }
  if (!any) {
    // no interior point: fall back to the one-sided gradients
    for (std::size_t i = 0; i < curve.q_grid.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) {
        out.dom_low[j] = std::min(out.dom_low[j], -curve.gradients[i][j]);
        out.dom_high[j] = std::max(out.dom_high[j], -curve.gradients[i][j]);
      }
  }
  out.degenerate = true;
  for (std::size_t j = 0; j < k; ++j)
    if (out.dom_high[j] - out.dom_low[j] > 1e-9) out.degenerate = false;
}

std::vector<QVector> default_alpha_grid(const SpectrumCurve& curve, const LegendreSpectrum& box) {
  const std::size_t k = curve.dimension();
  if (box.degenerate) return {box.dom_low};
  std::vector<std::vector<double>> axes(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> coords;
    for (const auto& q : curve.q_grid) coords.push_back(q[j]);
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    const std::size_t m = 2 * coords.size() + 1;
    const double width = box.dom_high[j] - box.dom_low[j];
    const double lo = box.dom_low[j] - 0.1 * width;
    const double hi = box.dom_high[j] + 0.1 * width;
    for (std::size_t s = 0; s < m; ++s)
      axes[j].push_back(m == 1 ? lo : lo + (hi - lo) * static_cast<double>(s) / (m - 1));
  }
  std::vector<QVector> grid;
  std::vector<std::size_t> pos(k, 0);
  for (;;) {
    QVector a(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) a[j] = axes[j][pos[j]];
    grid.push_back(a);
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (++pos[j] < axes[j].size()) break;
      pos[j] = 0;
      if (j == 0) return grid;
    }
    if (k == 0) return grid;
  }
}

LegendreSpectrum transform(SpectrumCurve curve, const std::vector<QVector>* alpha_grid) {
  require_legendre_kind(curve);
  if (curve.gradients.size() != curve.q_grid.size()) compute_gradients(curve);
  LegendreSpectrum out;
  domain_box(curve, out);

  const auto hull = lower_convex_envelope(curve.q_grid, curve.values);
  for (std::size_t i = 0; i < hull.size(); ++i)
    out.hull_distance = std::max(out.hull_distance, curve.values[i] - hull[i]);
  if (out.hull_distance > kHullTolerance)
    throw Error(ErrorCode::NonConvexBeyondTolerance,
                "lower convex hull moves the curve by " + format_double(out.hull_distance));

  out.alpha_grid = alpha_grid ? *alpha_grid : default_alpha_grid(curve, out);
  const std::size_t k = curve.dimension();
  for (const auto& a : out.alpha_grid) {
    if (a.size() != k)
      throw Error(ErrorCode::DimensionMismatch, "alpha vector does not match curve dimension");
    double f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) f = std::min(f, dot(a, curve.q_grid[i]) + hull[i]);
    out.f_values.push_back(f);
    bool inside = true;
    for (std::size_t j = 0; j < k; ++j)
      inside = inside && a[j] >= out.dom_low[j] - 1e-12 && a[j] <= out.dom_high[j] + 1e-12;
    out.in_domain.push_back(inside);
  }
  return out;
}

}  // namespace

std::string LegendreSpectrum::to_csv() const {
  const std::size_t k = alpha_grid.empty() ? 1 : alpha_grid.front().size();
  std::vector<std::string> header;
  for (std::size_t j = 1; j <= k; ++j) header.push_back("alpha_" + std::to_string(j));
  header.emplace_back("f");
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    std::vector<std::string> f;
    for (double v : alpha_grid[i]) f.push_back(format_double(v));
    f.push_back(format_double(f_values[i]));
    out += csv_line(f);
  }
  return out;
}

LegendreSpectrum legendre_transform(SpectrumCurve curve, std::span<const QVector> alpha_grid) {
  const std::vector<QVector> grid(alpha_grid.begin(), alpha_grid.end());
  return transform(std::move(curve), &grid);
}

LegendreSpectrum legendre_transform(SpectrumCurve curve) {
  return transform(std::move(curve), nullptr);
}

LevelSetBound level_set_upper_bound(const SpectrumCurve& curve_b, const SpectrumCurve& curve_B,
                                    const QVector& alpha) {
  if (curve_b.q_grid != curve_B.q_grid || curve_b.values.size() != curve_B.values.size())
    throw Error(ErrorCode::GridMismatch, "b and B curves use different q-grids");
  if (curve_b.q_grid.empty()) throw Error(ErrorCode::BadArgument, "empty q-grid");
  if (alpha.size() != curve_b.dimension())
    throw Error(ErrorCode::DimensionMismatch, "alpha vector does not match curve dimension");
  for (double a : alpha)
    if (a < 0.0) throw Error(ErrorCode::BadArgument, "alpha components must be >= 0");

  constexpr double inf = std::numeric_limits<double>::infinity();
  double min_b = inf, min_B = inf;
  LevelSetBound out;
  for (std::size_t i = 0; i < curve_b.q_grid.size(); ++i) {
    const auto& q = curve_b.q_grid[i];
    const double vb = dot(alpha, q) + curve_b.values[i];
    const double vB = dot(alpha, q) + curve_B.values[i];
    if (vb < 0.0 || vB < 0.0) out.empty_flag = true;
    const bool nonneg = std::all_of(q.begin(), q.end(), [](double v) { return v >= 0.0; });
    const bool nonpos = std::all_of(q.begin(), q.end(), [](double v) { return v <= 0.0; });
    if (!nonneg && !nonpos) continue;
    min_b = std::min(min_b, vb);
    min_B = std::min(min_B, vB);
  }
  if (min_b == inf) throw Error(ErrorCode::BadArgument, "q-grid has no point in a sign orthant");
  out.dim_bound = std::max(0.0, min_b);
  out.Dim_bound = std::max(0.0, min_B);
  return out;
}

LocalDimension local_dimension(const VectorMeasure& vm, double x, DepthRange depths) {
  if (depths.size() < 2)
    throw Error(ErrorCode::InsufficientDepths, "local dimension needs >= 2 depths");
  if (depths.min < 0) throw Error(ErrorCode::BadArgument, "depths must be >= 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw Error(ErrorCode::OutsideSupport, "x = " + format_double(x) + " lies outside [0, 1]");
  const std::size_t k = vm.dimension();
  const double log_b = std::log(static_cast<double>(vm.base()));
  LocalDimension out;
  out.x = x;
  out.lower = QVector(k, std::numeric_limits<double>::infinity());
  out.upper = QVector(k, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < k; ++j) {
    double prev = 0.0;
    for (int n = depths.min; n <= depths.max; ++n) {
      const double m = ball_mass(vm[j], x, std::pow(static_cast<double>(vm.base()), -n));
      if (!(m > 0.0))
        throw Error(ErrorCode::OutsideSupport, "x = " + format_double(x) + " has a null ball for component " +
                                                   std::to_string(j + 1) + " at depth " + std::to_string(n));
      const double lm = std::log(m);
      if (n > depths.min) {
        const double s = (lm - prev) / -log_b;
        out.lower[j] = std::min(out.lower[j], s);
        out.upper[j] = std::max(out.upper[j], s);
      }
      prev = lm;
    }
  }
  return out;
}

CoarseSpectrum coarse_spectrum(const VectorMeasure& vm, int depth, double bin_width) {
  if (depth < 4) throw Error(ErrorCode::BadArgument, "coarse spectrum needs depth >= 4");
  if (!(bin_width > 0.0)) throw Error(ErrorCode::BadArgument, "bin width must be > 0");
  const GridLevel level(vm, depth);
  const std::size_t k = vm.dimension();
  const double scale = -depth * std::log(static_cast<double>(vm.base()));
  const auto lm = level.joint_log_masses();
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  for (std::size_t c = 0; c < lm.size(); c += k) {
    std::vector<std::int64_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double a = std::round(lm[c + j] / scale * 1e9) / 1e9;
      idx[j] = static_cast<std::int64_t>(std::floor(a / bin_width + 1e-9));
    }
    ++counts[idx];
  }
  CoarseSpectrum out;
  out.depth = depth;
  out.bin_width = bin_width;
  const double denom = depth * std::log2(static_cast<double>(vm.base()));
  for (const auto& [idx, count] : counts) {
    CoarseBin bin;
    bin.index = idx;
    bin.center = QVector(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) bin.center[j] = (static_cast<double>(idx[j]) + 0.5) * bin_width;
    bin.count = count;
    bin.value = std::log2(static_cast<double>(count)) / denom;
    out.bins.push_back(std::move(bin));
  }
  return out;
}

bool taylor_check(double dim_est, double Dim_est, double tol) {
  return std::abs(dim_est - Dim_est) <= tol;
}

}  // namespace mixfrac
