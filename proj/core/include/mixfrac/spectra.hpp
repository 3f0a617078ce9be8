#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixfrac/measures.hpp"
#include "mixfrac/moment_engine.hpp"
#include "mixfrac/premeasure_dp.hpp"
#include "mixfrac/qvector.hpp"

namespace mixfrac {

enum class CurveKind { b, B, Lambda, Cbar, Clow, Lbar, Llow, Ibar, Ilow };

std::string_view to_string(CurveKind kind) noexcept;

/// A τ-type function sampled on a q-grid, optionally with gradients.
struct SpectrumCurve {
  std::vector<QVector> q_grid;
  std::vector<double> values;
  CurveKind kind = CurveKind::B;
  int base = 2;
  /// Filled by compute_gradients: central differences where both grid
  /// neighbours exist along an axis, one-sided otherwise.
  std::vector<QVector> gradients;
  /// True where every axis had neighbours on both sides.
  std::vector<bool> interior;

  std::size_t dimension() const noexcept { return q_grid.empty() ? 0 : q_grid.front().size(); }
  /// Index of q in the grid or npos.
  std::size_t find(const QVector& q) const;

  /// CSV with header `q_1..q_k,value,grad_1..grad_k`.
  std::string to_csv() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct SlopeEstimate {
  double lower = 0.0;  // min two-point slope (liminf proxy)
  double upper = 0.0;  // max two-point slope (limsup proxy)
  double lsq = 0.0;    // least-squares slope over all depths
};

/// Slopes of log_value against -log δ = depth · log b. Throws
/// InsufficientDepths with fewer than three depths for (q, kind).
SlopeEstimate slope_estimates(const MomentTable& table, const QVector& q, MomentKind kind);

/// log_b Σ_i Π_j p_{j,i}^{q_j}, summing over digits where every component
/// weight is positive. Throws NotMultinomial or ZeroWeightWithNegativeQ.
double analytic_tau_multinomial(const VectorMeasure& vm, const QVector& q);

/// Curve from slope estimates: Lbar/Llow use the cover rows, Cbar/Clow the
/// pack rows, Ibar/Ilow the integral rows (upper/lower respectively).
SpectrumCurve curve_from_table(const MomentTable& table, std::span<const QVector> q_grid,
                               CurveKind kind);

/// Curve from critical exponents of one kind (b, B or Lambda).
SpectrumCurve curve_from_exponents(std::span<const CriticalExponent> exponents, ExponentKind kind,
                                   int base);

void compute_gradients(SpectrumCurve& curve);

struct LegendreSpectrum {
  std::vector<QVector> alpha_grid;
  std::vector<double> f_values;
  std::vector<bool> in_domain;
  /// Componentwise bounding box of -∇curve over interior grid points.
  QVector dom_low;
  QVector dom_high;
  /// Dom(B) collapsed to a single point (affine curve).
  bool degenerate = false;
  /// max over the grid of curve - lower convex envelope.
  double hull_distance = 0.0;

  /// CSV with header `alpha_1..alpha_k,f`.
  std::string to_csv() const;
};

inline constexpr double kHullTolerance = 0.05;

/// f(α) = min over grid q of <α, q> + hull(q), where hull is the lower convex
/// envelope of the curve. Throws BadArgument unless the kind is B or Lambda and
/// NonConvexBeyondTolerance when the hull moves any value by more than 0.05.
LegendreSpectrum legendre_transform(SpectrumCurve curve, std::span<const QVector> alpha_grid);

/// Same on the default α-grid: the box of -∇curve widened by 10% per side,
/// 2·(axis points) + 1 samples per axis.
LegendreSpectrum legendre_transform(SpectrumCurve curve);

struct LevelSetBound {
  double dim_bound = 0.0;  // bound from b
  double Dim_bound = 0.0;  // bound from B
  bool empty_flag = false;
};

/// Upper bounds for the level set X(α): the minimum of <α,q> + curve(q) over
/// grid points q in the nonnegative or nonpositive orthant, clamped at 0.
/// empty_flag is set when some grid q makes <α,q> + b(q) or <α,q> + B(q)
/// negative. Throws GridMismatch when the curves use different grids.
LevelSetBound level_set_upper_bound(const SpectrumCurve& curve_b, const SpectrumCurve& curve_B,
                                    const QVector& alpha);

struct LocalDimension {
  double x = 0.0;
  QVector lower;
  QVector upper;
};

/// Per component, the min/max over consecutive depths n-1, n of the slope of
/// log mu_j(B(x, b^-n)) against log b^-n. Throws OutsideSupport when some
/// component gives the ball zero mass at the deepest depth.
LocalDimension local_dimension(const VectorMeasure& vm, double x, DepthRange depths);

struct CoarseBin {
  std::vector<std::int64_t> index;
  QVector center;
  std::uint64_t count = 0;
  double value = 0.0;  // log2(count) / (depth · log2 b)
};

struct CoarseSpectrum {
  int depth = 0;
  double bin_width = 0.0;
  std::vector<CoarseBin> bins;  // lexicographic in index
};

/// Histogram of per-component coarse exponents log m_j / log δ over the
/// joint-support cells at one depth (depth >= 4).
CoarseSpectrum coarse_spectrum(const VectorMeasure& vm, int depth, double bin_width);

bool taylor_check(double dim_est, double Dim_est, double tol);

}  // namespace mixfrac
