#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mixfrac/measures.hpp"
#include "mixfrac/qvector.hpp"

namespace mixfrac {

/// Auxiliary measure ν_q for a multinomial vector measure: digit weights
/// g_i ∝ Π_j p_{j,i}^{q_j} (g_i = 0 when some p_{j,i} = 0), t_q = τ(q).
struct GibbsMeasure {
  MeasureComponent nu;
  double t_q = 0.0;
  QVector q;
  double k_lower = 1.0;
  double k_upper = 1.0;
  std::string phi_note;
};

/// Throws NotMultinomial or ZeroWeightWithNegativeQ.
GibbsMeasure build_gibbs(const VectorMeasure& vm, const QVector& q);

struct A1Report {
  double k_lower = 0.0;
  double k_upper = 0.0;
  std::vector<double> lower_by_depth;
  std::vector<double> upper_by_depth;
  /// Per-depth extremes agree across depths within 1e-9 (relative).
  bool stable = false;
  /// k_lower and k_upper both equal 1 within kA1Tolerance.
  bool exact = false;
};

inline constexpr double kA1Tolerance = 1e-12;

/// Extremes over joint-support cells of ν(I) / (Π_j μ_j(I)^{q_j} · diam(I)^{t_q}).
A1Report a1_check(const VectorMeasure& vm, const GibbsMeasure& gibbs, DepthRange depths);

/// (1 / (n log b)) · log Σ_{depth-n cells} ν(I) Π_j μ_j(I)^{p_j}, summed cell by
/// cell. Throws ZeroWeightWithNegativeQ when p_j < 0 meets a μ_j-null cell
/// that ν charges.
double c_qn(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& p, int n);

/// Closed-form limit log_b Σ_i g_i Π_j p_{j,i}^{p_j}.
double gibbs_cumulant(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& p);

/// Exact gradient of gibbs_cumulant: Σ_i w_i log_b p_{j,i} with
/// w_i ∝ g_i Π_j p_{j,i}^{p_j}.
QVector exact_cumulant_gradient(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                                const QVector& p);

struct GradC {
  QVector minus;
  QVector plus;
};

/// One-sided difference quotients of the cumulant at p = 0.
GradC grad_c(const VectorMeasure& vm, const GibbsMeasure& gibbs, double h = 1e-4);

/// W_n = (log μ_1(I_n(x)), ..., log μ_k(I_n(x))) for x drawn from ν_q.
struct LDSample {
  int n = 0;
  QVector w;
  double a_n = 0.0;  // n log b
};

/// Samples are produced in fixed chunks; chunk c draws from a 64-bit Mersenne
/// Twister seeded with splitmix64(seed, c), so the output does not depend on
/// the thread count.
std::vector<LDSample> draw_ld_samples(const VectorMeasure& vm, const GibbsMeasure& gibbs, int n,
                                      std::size_t samples, std::uint64_t seed,
                                      unsigned threads = 1);

enum class CumulantMode { exact, montecarlo };

struct CumulantEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exact mode
};

/// C_n(t) = (1/a_n) log E exp(<t, W_n>). Exact mode is the closed form; Monte
/// Carlo mode averages over `samples` draws and reports a delta-method
/// standard error.
CumulantEstimate ld_cumulant(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& t,
                             int n, CumulantMode mode, std::size_t samples = 0,
                             std::uint64_t seed = 0, unsigned threads = 1);

/// One line of a statistical report.
struct Claim {
  std::string claim;
  int n = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct BoundsLevel {
  int n = 0;
  double eta = 0.0;  // 4 / sqrt(n)
  QVector mean;
  double upper_violations = 0.0;  // fraction with some W_j/a_n > ∇₊C_j(0) + η
  double lower_violations = 0.0;  // fraction with some W_j/a_n < ∇₋C_j(0) - η
};

struct BoundsReport {
  GradC gradient;
  std::vector<BoundsLevel> levels;
  bool violations_decay = false;
  bool mean_converges = false;
  bool pass = false;
  std::vector<Claim> claims() const;
};

/// Draws paths of length n_range.max and tracks W_n/a_n along them.
BoundsReport ld_bounds_verify(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                              DepthRange n_range, std::size_t samples, std::uint64_t seed,
                              unsigned threads = 1);

struct DecayLevel {
  int n = 0;
  double normalized_log = 0.0;  // -inf when the event is empty
  double chernoff = 0.0;
};

enum class Tail { upper, lower };

struct DecayReport {
  bool upper_tail = true;  // event W_n/a_n >= α; false: W_n/a_n <= α
  QVector alpha;
  QVector gradient;  // ∇C(t)
  std::vector<DecayLevel> levels;
  bool negative = false;
  bool decreasing = false;
  bool chernoff_bounded = false;
  bool pass = false;  // negative && decreasing
  std::vector<Claim> claims() const;
};

/// (1/a_n) log(e^{-a_n C(t)} E(exp<t, W_n> 1{event})) summed exactly over the
/// digit-type classes of depth n. The upper tail needs α strictly above ∇C(t)
/// in every coordinate, the lower tail strictly below; otherwise BadAlpha. The Chernoff column is the
/// bound C(t+h) - C(t) - <h, α> minimized over h on the ray of ±(1,...,1).
DecayReport ld_markov_decay_check(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                                  const QVector& t, const QVector& alpha, DepthRange n_range,
                                  Tail tail = Tail::upper);

}  // namespace mixfrac
