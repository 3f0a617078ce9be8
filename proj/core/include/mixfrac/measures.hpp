#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixfrac/errors.hpp"

namespace mixfrac {

/// Inclusive range of grid depths. `min > max` denotes the empty range.
struct DepthRange {
  int min = 0;
  int max = -1;

  bool empty() const noexcept { return min > max; }
  int size() const noexcept { return empty() ? 0 : max - min + 1; }
};

/// Number of cells of the base-b grid at `depth`; throws BadArgument when the
/// count does not fit in 63 bits.
std::uint64_t cell_count(int base, int depth);

/// A cell of the base-b grid on [0,1]: [index·b^-depth, (index+1)·b^-depth).
/// The last cell of each depth is closed on the right so that x = 1 belongs
/// to the grid.
struct DyadicCell {
  int base = 2;
  int depth = 0;
  std::uint64_t index = 0;

  double lower() const;
  double upper() const;
  double diameter() const;
  double midpoint() const { return 0.5 * (lower() + upper()); }

  DyadicCell parent() const;
  DyadicCell child(int digit) const;
  /// Most significant digit first; size == depth.
  std::vector<int> digits() const;

  friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
};

/// Validates base/depth/index; throws BadBase or BadCell.
void validate_cell(const DyadicCell& cell);

/// Index of the depth-n cell that contains x (x clamped to [0,1]).
std::uint64_t cell_index_of(double x, int base, int depth);

struct Atom {
  double position = 0.0;
  double weight = 0.0;
};

/// One probability measure on [0,1]: either a multinomial cascade (the mass of
/// a depth-n cell is the product of its digit weights) or a finite sum of
/// point masses. Immutable after construction.
class MeasureComponent {
 public:
  enum class Kind { multinomial, empirical };

  static MeasureComponent multinomial(int base, std::vector<double> weights);
  static MeasureComponent empirical(std::vector<Atom> atoms);

  Kind kind() const noexcept { return kind_; }
  bool is_multinomial() const noexcept { return kind_ == Kind::multinomial; }
  /// Cascade base; 0 for empirical components.
  int base() const noexcept { return base_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Sorted by position.
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  /// Same cascade with digit order reversed (x -> 1 - x).
  MeasureComponent reflected() const;

  std::string describe() const;

 private:
  MeasureComponent() = default;

  Kind kind_ = Kind::multinomial;
  int base_ = 0;
  std::vector<double> weights_;
  std::vector<double> below_;  // below_[d] = sum of weights with digit < d
  std::vector<double> reversed_;
  std::vector<double> reversed_below_;
  std::vector<Atom> atoms_;
  std::vector<double> prefix_;  // prefix_[i] = total weight of atoms_[0..i)

  friend double left_open_mass(const MeasureComponent&, double, int);
  friend double right_open_mass(const MeasureComponent&, double, int);
  friend double atoms_in(const MeasureComponent&, double, double, bool);
};

/// Ordered tuple (mu_1, ..., mu_k) on a shared base-b grid.
class VectorMeasure {
 public:
  static constexpr int kDefaultMaxDepth = 24;

  /// `base` = 0 infers the common multinomial base (2 if every component is
  /// empirical). Throws BadBase when multinomial bases disagree.
  explicit VectorMeasure(std::vector<MeasureComponent> components, int base = 0,
                         int max_depth = kDefaultMaxDepth);

  std::size_t dimension() const noexcept { return components_.size(); }
  int base() const noexcept { return base_; }
  int max_depth() const noexcept { return max_depth_; }
  const MeasureComponent& operator[](std::size_t j) const { return components_[j]; }
  std::span<const MeasureComponent> components() const noexcept { return components_; }
  bool all_multinomial() const noexcept;

 private:
  std::vector<MeasureComponent> components_;
  int base_ = 2;
  int max_depth_ = kDefaultMaxDepth;
};

/// Exact mass of a grid cell; additive over the cell's children.
double cell_mass(const MeasureComponent& component, const DyadicCell& cell);

/// log of cell_mass; -inf on zero mass. Multinomial masses are accumulated as
/// sums of log digit weights beyond depth 40.
double cell_log_mass(const MeasureComponent& component, const DyadicCell& cell);

/// Log masses of all b^depth cells in index order.
std::vector<double> log_cell_masses(const MeasureComponent& component, int base, int depth);

/// mu([0, x)). Multinomial values come from the base-b digit expansion of x,
/// which is exact once the expansion terminates and otherwise truncated after
/// `max_digits` digits with error at most max_weight^max_digits.
double left_open_mass(const MeasureComponent& component, double x, int max_digits = 128);

/// mu([0, x]).
double cdf(const MeasureComponent& component, double x, int max_digits = 128);

/// Mass of the closed ball [center - radius, center + radius] ∩ [0,1].
double ball_mass(const MeasureComponent& component, double center, double radius,
                 int max_digits = 128);

/// Depth-n cells on which every component has strictly positive mass, ordered
/// by index. Throws EmptySupport when there are none.
std::vector<DyadicCell> joint_support_cells(const VectorMeasure& vm, int depth);

struct DoublingComponent {
  std::vector<double> max_ratio_by_depth;  // aligned with the depth range
  double max_ratio = 0.0;
  int zero_denominators = 0;
};

struct DoublingReport {
  enum class Class { P0, P1, neither };

  double a = 2.0;
  DepthRange depths;
  int sample_points = 0;
  std::vector<DoublingComponent> components;
  Class classification = Class::neither;
};

std::string_view to_string(DoublingReport::Class c) noexcept;

/// Sampled doubling ratios mu_j(B(x, a·r)) / mu_j(B(x, r)) with r = b^-n.
///
/// Sample points are midpoints of joint-support cells two levels below the
/// deepest requested depth (evenly strided down to `samples` points) plus the
/// atoms of any empirical component. Samples with a zero denominator are
/// counted and skipped. The class is P1 when every component's worst ratio is
/// non-increasing over the two deepest levels, P0 when only each individual
/// point's ratio is, and neither otherwise.
DoublingReport estimate_doubling(const VectorMeasure& vm, double a, DepthRange depths,
                                 int samples);

}  // namespace mixfrac
