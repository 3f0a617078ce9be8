#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixfrac/measures.hpp"
#include "mixfrac/qvector.hpp"

namespace mixfrac {

enum class MomentKind { cover, pack, integral };

std::string_view to_string(MomentKind kind) noexcept;
MomentKind moment_kind_from_string(std::string_view name);

/// Log cell masses of one grid depth, cached so that many exponent vectors can
/// be evaluated against the same level without touching the measures again.
class GridLevel {
 public:
  GridLevel(const VectorMeasure& vm, int depth);

  int depth() const noexcept { return depth_; }
  int base() const noexcept { return base_; }
  std::size_t dimension() const noexcept { return k_; }
  std::size_t joint_cells() const noexcept { return k_ ? joint_.size() / k_ : 0; }

  /// Row-major [cell][component] log masses over the joint support.
  std::span<const double> joint_log_masses() const noexcept { return joint_; }

  /// log Σ_{joint cells} Π_j m_j^{q_j}. Throws EmptySupport.
  double log_moment(const QVector& q) const;

  /// Σ_j log Σ_{cells with m_j > 0} m_j^{q_j + 1}.
  double log_integral(const QVector& q) const;

 private:
  int depth_;
  int base_;
  std::size_t k_;
  std::vector<double> joint_;
  std::vector<std::vector<double>> positive_;  // per component, log masses of positive cells
};

/// log of the covering moment sum at depth n over the canonical grid covering
/// by joint-support cells.
double covering_moment(const VectorMeasure& vm, const QVector& q, int depth);

/// log of the packing moment sum. Grid cells of one depth are disjoint and
/// cover the support, so the value coincides with covering_moment.
double packing_moment(const VectorMeasure& vm, const QVector& q, int depth);

/// log of the factorized Rényi integral: each component contributes
/// log ∫ mu_j(B(t_j, δ))^{q_j} dmu_j(t_j), with the ball replaced by the
/// containing depth-n cell.
double renyi_integral(const VectorMeasure& vm, const QVector& q, int depth);

struct MomentRow {
  QVector q;
  int depth = 0;
  MomentKind kind = MomentKind::cover;
  double log_value = 0.0;
};

class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(int base, std::vector<MomentRow> rows);

  int base() const noexcept { return base_; }
  std::span<const MomentRow> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  const MomentRow* find(const QVector& q, int depth, MomentKind kind) const;
  /// Rows for (q, kind) in ascending depth order.
  std::vector<const MomentRow*> series(const QVector& q, MomentKind kind) const;

  /// CSV with header `q_1,...,q_k,depth,kind,log_value,base`.
  std::string to_csv() const;

 private:
  int base_ = 2;
  std::vector<MomentRow> rows_;
};

/// One row per distinct (q, depth, kind), ordered by first occurrence of q in
/// the grid, then depth, then kind order as given. Rows are computed
/// independently on up to `threads` workers and stored in fixed slots.
MomentTable build_moment_table(const VectorMeasure& vm, std::span<const QVector> q_grid,
                               DepthRange depths, std::span<const MomentKind> kinds,
                               unsigned threads = 1);

/// Throws DimensionMismatch / BadArgument unless q has k finite entries.
void check_exponents(const VectorMeasure& vm, const QVector& q);

}  // namespace mixfrac
