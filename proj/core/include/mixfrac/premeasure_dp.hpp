#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixfrac/measures.hpp"
#include "mixfrac/qvector.hpp"

namespace mixfrac {

/// (q, t)-weighted grid tree: w(I) = Π_j mu_j(I)^{q_j} · diam(I)^t.
struct WeightedTreeSpec {
  VectorMeasure vm;
  QVector q;
  double t = 0.0;
  int max_depth = 12;
};

/// Log (q)-weights Σ_j q_j log mu_j(I) of every joint-support cell at depths
/// 0..max_depth; the t-dependent diameter factor is applied per query, so one
/// tree serves a whole root search.
///
/// A query at target depth n ranges over antichains of cells whose subtree
/// contains a depth-n joint-support cell (the "eligible" cells) and which
/// together cover every depth-n joint-support cell. Cells shallower than
/// `min_depth` are never selected; min_depth plays the role of the ε in the
/// ε-coverings and ε-packings (ε = b^-min_depth).
class CascadeTree {
 public:
  CascadeTree(const VectorMeasure& vm, const QVector& q, int max_depth);

  int base() const noexcept { return base_; }
  int max_depth() const noexcept { return static_cast<int>(terms_.size()) - 1; }

  /// log min over antichains of Σ w(I).
  double cover(double t, int depth, int min_depth = 0) const;
  /// log max over antichains of Σ w(I).
  double pack(double t, int depth, int min_depth = 0) const;

  /// Same as cover/pack with the tree restricted to the subtrees of the listed
  /// depth-1 cells.
  double solve(double t, int depth, int min_depth, bool maximize,
               std::span<const std::uint64_t> depth1_cells) const;

  /// Σ_j q_j log mu_j(I) for the cell (depth, index); -inf outside the joint
  /// support.
  double mass_term(int depth, std::uint64_t index) const { return terms_[depth][index]; }

 private:
  int base_;
  std::vector<std::vector<double>> terms_;
};

/// Exact dyadic proxy of the mixed Hausdorff pre-measure at scale depth n:
/// H(leaf) = w(leaf), H(node) = min(w(node), Σ_children H(child)), in logs.
double dp_cover_value(const WeightedTreeSpec& spec, int depth, int min_depth = 0);

/// Packing counterpart with max in place of min.
double dp_pack_value(const WeightedTreeSpec& spec, int depth, int min_depth = 0);

enum class ExponentKind { hausdorff_b, packing_B, prepacking_Lambda };

std::string_view to_string(ExponentKind kind) noexcept;
ExponentKind exponent_kind_from_string(std::string_view name);

struct CriticalExponent {
  QVector q;
  ExponentKind kind = ExponentKind::hausdorff_b;
  double value = 0.0;
  double t_low = 0.0;
  double t_high = 0.0;
  int depth_used = 0;
};

struct ExponentOptions {
  double tol = 1e-4;
  int depth = 12;
  double t_min = -64.0;
  double t_max = 64.0;
};

/// Growth rate of the ε-restricted DP value when the scale window [m, n] is
/// shifted one level: g(t) = V(m, n) - V(m-1, n-1) with n = depth and
/// m = n - n/2. For multinomial inputs g(t) = log Σ_i Π_j p_{j,i}^{q_j} - t log b.
double dp_growth_rate(const CascadeTree& tree, double t, int depth, bool maximize);

/// Root of the growth rate in t by bisection. hausdorff_b uses the covering DP;
/// packing_B and prepacking_Lambda both use the packing DP and coincide on the
/// grid family. Throws NoBracket when g keeps one sign on [t_min, t_max].
CriticalExponent critical_exponent(const VectorMeasure& vm, const QVector& q, ExponentKind kind,
                                   const ExponentOptions& options = {});

std::vector<CriticalExponent> critical_exponents(const VectorMeasure& vm,
                                                 std::span<const QVector> q_grid,
                                                 std::span<const ExponentKind> kinds,
                                                 const ExponentOptions& options = {},
                                                 unsigned threads = 1);

/// CSV with header `q_1,...,q_k,kind,t_star,t_low,t_high,depth`.
std::string exponents_to_csv(std::span<const CriticalExponent> exponents);

struct BesicovitchReport {
  double cover = 0.0;
  double pack = 0.0;
  double log_xi = 0.0;
  double slack = 0.0;  // log_xi + pack - cover
  bool holds = false;
};

/// Checks cover <= log ξ + pack at the given depth.
BesicovitchReport besicovitch_check(const VectorMeasure& vm, const QVector& q, double t, int depth,
                                    double xi = 2.0);

struct AdditivityReport {
  std::array<std::uint64_t, 2> cells{};
  std::array<double, 2> parts{};
  double union_value = 0.0;
  double sum_value = 0.0;
  bool holds = false;
};

/// Packing DP over the union of two depth-1 subtrees versus the sum of the
/// per-subtree values (only cells of depth >= 1 are eligible). Throws BadSplit
/// when a named subtree has empty support.
AdditivityReport separated_additivity_check(const VectorMeasure& vm, const QVector& q, double t,
                                            int depth, std::array<std::uint64_t, 2> cells);

}  // namespace mixfrac
