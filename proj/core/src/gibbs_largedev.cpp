#include "mixfrac/gibbs_largedev.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "mixfrac/numeric.hpp"
#include "mixfrac/parallel.hpp"
#include "mixfrac/spectra.hpp"

namespace mixfrac {
namespace {

constexpr std::size_t kChunk = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(chunk));
}

void require_multinomial(const VectorMeasure& vm) {
  if (!vm.all_multinomial())
    throw Error(ErrorCode::NotMultinomial, "Gibbs construction needs multinomial components");
}

double weight(const VectorMeasure& vm, std::size_t j, std::size_t i) {
  return vm[j].weights()[i];
}

// log Σ_i g_i Π_j p_{j,i}^{p_j}, natural log.
double log_tilted_sum(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& p) {
  check_exponents(vm, p);
  const auto g = gibbs.nu.weights();
  LogSumAccumulator acc;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0) continue;
    double term = std::log(g[i]);
    for (std::size_t j = 0; j < vm.dimension(); ++j) {
      const double w = weight(vm, j, i);
      if (w == 0.0) {
        if (p[j] < 0.0)
          throw Error(ErrorCode::ZeroWeightWithNegativeQ, "negative exponent on a zero weight");
        if (p[j] > 0.0) term = kNegInf;
        continue;
      }
      term += p[j] * std::log(w);
    }
    acc.add(term);
  }
  return acc.value();
}

// Digit paths of length n from ν, row-major [sample][step].
std::vector<std::uint16_t> draw_paths(const GibbsMeasure& gibbs, int n, std::size_t samples,
                                      std::uint64_t seed, unsigned threads) {
  const auto g = gibbs.nu.weights();
  std::vector<double> cumulative(g.size());
  std::partial_sum(g.begin(), g.end(), cumulative.begin());
  const auto len = static_cast<std::size_t>(n);
  std::vector<std::uint16_t> digits(samples * len);
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::mt19937_64 rng(chunk_seed(seed, c));
    const std::size_t end = std::min(samples, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      for (std::size_t step = 0; step < len; ++step) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cumulative.back();
        auto d = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        d = std::min(d, g.size() - 1);
        while (g[d] == 0.0) --d;  // u landed on the right edge of a null digit
        digits[s * len + step] = static_cast<std::uint16_t>(d);
      }
    }
  });
  return digits;
}

// log_p[j][i] = log p_{j,i}.
std::vector<std::vector<double>> log_weights(const VectorMeasure& vm) {
  std::vector<std::vector<double>> out(vm.dimension());
  for (std::size_t j = 0; j < vm.dimension(); ++j)
    for (double w : vm[j].weights()) out[j].push_back(w > 0.0 ? std::log(w) : kNegInf);
  return out;
}

void check_samples(std::size_t samples, int n) {
  if (samples == 0) throw Error(ErrorCode::BadArgument, "Monte Carlo needs samples >= 1");
  if (n < 1) throw Error(ErrorCode::BadArgument, "n must be >= 1");
}

}  // namespace

GibbsMeasure build_gibbs(const VectorMeasure& vm, const QVector& q) {
  require_multinomial(vm);
  check_exponents(vm, q);
  const auto b = static_cast<std::size_t>(vm.base());
  std::vector<double> log_g(b, kNegInf);
  for (std::size_t i = 0; i < b; ++i) {
    double term = 0.0;
    for (std::size_t j = 0; j < vm.dimension(); ++j) {
      const double w = weight(vm, j, i);
      if (w == 0.0) {
        if (q[j] < 0.0)
          throw Error(ErrorCode::ZeroWeightWithNegativeQ,
                      "component " + std::to_string(j + 1) + " has a zero weight and q < 0");
        term = kNegInf;
        break;
      }
      term += q[j] * std::log(w);
    }
    log_g[i] = term;
  }
  const double total = log_sum_exp(log_g);
  if (total == kNegInf) throw Error(ErrorCode::EmptySupport, "no digit carries mass in every component");
  std::vector<double> g(b);
  for (std::size_t i = 0; i < b; ++i) g[i] = log_g[i] == kNegInf ? 0.0 : std::exp(log_g[i] - total);
  return GibbsMeasure{
      MeasureComponent::multinomial(vm.base(), std::move(g)),
      analytic_tau_multinomial(vm, q),
      q,
      1.0,
      1.0,
      "phi_q = 0; grid cells of diameter b^-n stand in for balls of radius r",
  };
}

A1Report a1_check(const VectorMeasure& vm, const GibbsMeasure& gibbs, DepthRange depths) {
  if (depths.empty()) throw Error(ErrorCode::BadArgument, "a1_check needs a nonempty depth range");
  const double log_b = std::log(static_cast<double>(vm.base()));
  A1Report r;
  r.k_lower = std::numeric_limits<double>::infinity();
  r.k_upper = -std::numeric_limits<double>::infinity();
  for (int n = depths.min; n <= depths.max; ++n) {
    const GridLevel level(vm, n);
    const auto nu = log_cell_masses(gibbs.nu, vm.base(), n);
    const auto cells = joint_support_cells(vm, n);
    const auto lm = level.joint_log_masses();
    const std::size_t k = vm.dimension();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double denom = -gibbs.t_q * n * log_b;
      for (std::size_t j = 0; j < k; ++j) denom += gibbs.q[j] * lm[c * k + j];
      const double ratio = std::exp(nu[cells[c].index] - denom);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    r.lower_by_depth.push_back(lo);
    r.upper_by_depth.push_back(hi);
    r.k_lower = std::min(r.k_lower, lo);
    r.k_upper = std::max(r.k_upper, hi);
  }
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
  r.stable = true;
  for (std::size_t i = 1; i < r.lower_by_depth.size(); ++i)
    r.stable = r.stable && same(r.lower_by_depth[i], r.lower_by_depth[0]) &&
               same(r.upper_by_depth[i], r.upper_by_depth[0]);
  r.exact = std::abs(r.k_lower - 1.0) <= kA1Tolerance && std::abs(r.k_upper - 1.0) <= kA1Tolerance;
  return r;
}

double c_qn(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& p, int n) {
  check_exponents(vm, p);
  if (n < 1) throw Error(ErrorCode::BadArgument, "c_qn needs n >= 1");
  const auto nu = log_cell_masses(gibbs.nu, vm.base(), n);
  std::vector<std::vector<double>> per(vm.dimension());
  for (std::size_t j = 0; j < vm.dimension(); ++j) per[j] = log_cell_masses(vm[j], vm.base(), n);
  LogSumAccumulator acc;
  for (std::size_t c = 0; c < nu.size(); ++c) {
    if (nu[c] == kNegInf) continue;
    double term = nu[c];
    for (std::size_t j = 0; j < vm.dimension() && term != kNegInf; ++j) {
      if (per[j][c] == kNegInf) {
        if (p[j] < 0.0)
          throw Error(ErrorCode::ZeroWeightWithNegativeQ, "negative exponent on a null cell");
        if (p[j] > 0.0) term = kNegInf;
        continue;
      }
      term += p[j] * per[j][c];
    }
    acc.add(term);
  }
  return acc.value() / (n * std::log(static_cast<double>(vm.base())));
}

double gibbs_cumulant(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& p) {
  require_multinomial(vm);
  return log_tilted_sum(vm, gibbs, p) / std::log(static_cast<double>(vm.base()));
}

QVector exact_cumulant_gradient(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                                const QVector& p) {
  require_multinomial(vm);
  const double total = log_tilted_sum(vm, gibbs, p);
  const double log_b = std::log(static_cast<double>(vm.base()));
  const auto g = gibbs.nu.weights();
  const auto lp = log_weights(vm);
  QVector grad(vm.dimension(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0) continue;
    double term = std::log(g[i]);
    for (std::size_t j = 0; j < vm.dimension(); ++j) term += p[j] * lp[j][i];
    const double w = std::exp(term - total);
    for (std::size_t j = 0; j < vm.dimension(); ++j) grad[j] += w * lp[j][i] / log_b;
  }
  return grad;
}

GradC grad_c(const VectorMeasure& vm, const GibbsMeasure& gibbs, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::BadArgument, "step h must be > 0");
  const std::size_t k = vm.dimension();
  const QVector zero(k, 0.0);
  const double c0 = gibbs_cumulant(vm, gibbs, zero);
  GradC out{QVector(k, 0.0), QVector(k, 0.0)};
  for (std::size_t j = 0; j < k; ++j) {
    QVector step = zero;
    step[j] = h;
    out.plus[j] = (gibbs_cumulant(vm, gibbs, step) - c0) / h;
    step[j] = -h;
    out.minus[j] = (c0 - gibbs_cumulant(vm, gibbs, step)) / h;
  }
  return out;
}

std::vector<LDSample> draw_ld_samples(const VectorMeasure& vm, const GibbsMeasure& gibbs, int n,
                                      std::size_t samples, std::uint64_t seed, unsigned threads) {
  require_multinomial(vm);
  check_samples(samples, n);
  const auto digits = draw_paths(gibbs, n, samples, seed, threads);
  const auto lp = log_weights(vm);
  const std::size_t k = vm.dimension();
  const auto len = static_cast<std::size_t>(n);
  const double a_n = n * std::log(static_cast<double>(vm.base()));
  std::vector<LDSample> out(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    QVector w(k, 0.0);
    for (std::size_t step = 0; step < len; ++step)
      for (std::size_t j = 0; j < k; ++j) w[j] += lp[j][digits[s * len + step]];
    out[s] = LDSample{n, std::move(w), a_n};
  }
  return out;
}

CumulantEstimate ld_cumulant(const VectorMeasure& vm, const GibbsMeasure& gibbs, const QVector& t,
                             int n, CumulantMode mode, std::size_t samples, std::uint64_t seed,
                             unsigned threads) {
  check_exponents(vm, t);
  if (n < 1) throw Error(ErrorCode::BadArgument, "n must be >= 1");
  if (mode == CumulantMode::exact) return {gibbs_cumulant(vm, gibbs, t), 0.0};

  const auto draws = draw_ld_samples(vm, gibbs, n, samples, seed, threads);
  std::vector<double> x(draws.size());
  for (std::size_t s = 0; s < draws.size(); ++s) x[s] = dot(t, draws[s].w);
  const double shift = *std::max_element(x.begin(), x.end());
  double mean = 0.0;
  for (double v : x) mean += std::exp(v - shift);
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) {
    const double d = std::exp(v - shift) - mean;
    var += d * d;
  }
  const double count = static_cast<double>(x.size());
  var /= std::max(1.0, count - 1.0);
  const double a_n = draws.front().a_n;
  CumulantEstimate out;
  out.value = (shift + std::log(mean)) / a_n;
  // delta method: sd(log m̂) ≈ sd(m̂) / m
  out.std_error = std::sqrt(var / count) / mean / a_n;
  return out;
}

BoundsReport ld_bounds_verify(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                              DepthRange n_range, std::size_t samples, std::uint64_t seed,
                              unsigned threads) {
  require_multinomial(vm);
  if (n_range.empty() || n_range.min < 1)
    throw Error(ErrorCode::BadArgument, "n_range must be nonempty with min >= 1");
  check_samples(samples, n_range.max);
  const auto digits = draw_paths(gibbs, n_range.max, samples, seed, threads);
  const auto lp = log_weights(vm);
  const std::size_t k = vm.dimension();
  const auto len = static_cast<std::size_t>(n_range.max);
  const double log_b = std::log(static_cast<double>(vm.base()));

  BoundsReport r;
  r.gradient = grad_c(vm, gibbs);
  std::vector<QVector> w(samples, QVector(k, 0.0));
  for (int n = 1; n <= n_range.max; ++n) {
    for (std::size_t s = 0; s < samples; ++s)
      for (std::size_t j = 0; j < k; ++j) w[s][j] += lp[j][digits[s * len + n - 1]];
    if (n < n_range.min) continue;
    BoundsLevel level;
    level.n = n;
    level.eta = 4.0 / std::sqrt(static_cast<double>(n));
    level.mean = QVector(k, 0.0);
    const double a_n = n * log_b;
    std::size_t up = 0, down = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      bool above = false, below = false;
      for (std::size_t j = 0; j < k; ++j) {
        const double ratio = w[s][j] / a_n;
        level.mean[j] += ratio;
        above = above || ratio > r.gradient.plus[j] + level.eta;
        below = below || ratio < r.gradient.minus[j] - level.eta;
      }
      up += above;
      down += below;
    }
    for (std::size_t j = 0; j < k; ++j) level.mean[j] /= static_cast<double>(samples);
    level.upper_violations = static_cast<double>(up) / static_cast<double>(samples);
    level.lower_violations = static_cast<double>(down) / static_cast<double>(samples);
    r.levels.push_back(std::move(level));
  }
  const auto& first = r.levels.front();
  const auto& last = r.levels.back();
  r.violations_decay = last.upper_violations <= first.upper_violations &&
                       last.lower_violations <= first.lower_violations;
  r.mean_converges = true;
  for (std::size_t j = 0; j < k; ++j) {
    const double centre = 0.5 * (r.gradient.plus[j] + r.gradient.minus[j]);
    r.mean_converges = r.mean_converges && std::abs(last.mean[j] - centre) <= last.eta;
  }
  r.pass = r.violations_decay && r.mean_converges;
  return r;
}

std::vector<Claim> BoundsReport::claims() const {
  std::vector<Claim> out;
  for (const auto& level : levels) {
    out.push_back({"limsup W_n/a_n <= grad+ C(0): violation fraction", level.n,
                   level.upper_violations, level.eta, level.upper_violations <= levels.front().upper_violations});
    out.push_back({"grad- C(0) <= W_n/a_n: violation fraction", level.n, level.lower_violations,
                   level.eta, level.lower_violations <= levels.front().lower_violations});
  }
  if (!levels.empty()) {
    const auto& last = levels.back();
    double worst = 0.0;
    for (std::size_t j = 0; j < last.mean.size(); ++j)
      worst = std::max(worst, std::abs(last.mean[j] - 0.5 * (gradient.plus[j] + gradient.minus[j])));
    out.push_back({"mean W_n/a_n -> grad C(0)", last.n, worst, last.eta, mean_converges});
  }
  return out;
}

DecayReport ld_markov_decay_check(const VectorMeasure& vm, const GibbsMeasure& gibbs,
                                  const QVector& t, const QVector& alpha, DepthRange n_range,
                                  Tail tail) {
  require_multinomial(vm);
  check_exponents(vm, t);
  check_exponents(vm, alpha);
  if (n_range.empty() || n_range.min < 1)
    throw Error(ErrorCode::BadArgument, "n_range must be nonempty with min >= 1");
  const std::size_t k = vm.dimension();
  DecayReport r;
  r.alpha = alpha;
  r.gradient = exact_cumulant_gradient(vm, gibbs, t);
  bool all_above = true, all_below = true;
  for (std::size_t j = 0; j < k; ++j) {
    all_above = all_above && alpha[j] > r.gradient[j];
    all_below = all_below && alpha[j] < r.gradient[j];
  }
  r.upper_tail = tail == Tail::upper;
  if (r.upper_tail ? !all_above : !all_below)
    throw Error(ErrorCode::BadAlpha, "alpha " + alpha.str() + " is not strictly " +
                                         (r.upper_tail ? "above" : "below") + " grad C(t) = " +
                                         r.gradient.str());

  const double log_b = std::log(static_cast<double>(vm.base()));
  const double c_t = gibbs_cumulant(vm, gibbs, t);
  const auto g = gibbs.nu.weights();
  const auto lp = log_weights(vm);
  const std::size_t b = g.size();

  // Chernoff: min over s >= 0 of C(t + s·u) - C(t) - s<u, α>, convex in s.
  const double u = r.upper_tail ? 1.0 : -1.0;
  auto phi = [&](double s) {
    return gibbs_cumulant(vm, gibbs, t.plus(s * u)) - c_t - s * u * std::accumulate(alpha.begin(), alpha.end(), 0.0);
  };
  double lo = 0.0, hi = 64.0;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - ratio * (hi - lo);
    const double m2 = lo + ratio * (hi - lo);
    if (phi(m1) <= phi(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double chernoff = std::min(phi(0.5 * (lo + hi)), 0.0);

  for (int n = n_range.min; n <= n_range.max; ++n) {
    const double a_n = n * log_b;
    LogSumAccumulator acc;
    std::vector<int> counts(b, 0);
    // enumerate digit-type classes: counts summing to n
    std::function<void(std::size_t, int)> visit = [&](std::size_t i, int left) {
      if (i + 1 == b) {
        counts[i] = left;
        double log_p = std::lgamma(n + 1.0);
        QVector w(k, 0.0);
        for (std::size_t d = 0; d < b; ++d) {
          if (counts[d] == 0) continue;
          if (g[d] == 0.0) return;
          log_p += counts[d] * std::log(g[d]) - std::lgamma(counts[d] + 1.0);
          for (std::size_t j = 0; j < k; ++j) w[j] += counts[d] * lp[j][d];
        }
        for (std::size_t j = 0; j < k; ++j) {
          const double x = w[j] / a_n;
          if (r.upper_tail ? x < alpha[j] : x > alpha[j]) return;
        }
        acc.add(log_p + dot(t, w));
        return;
      }
      for (int c = 0; c <= left; ++c) {
        counts[i] = c;
        visit(i + 1, left - c);
      }
    };
    visit(0, n);
    const double value = acc.value();
    DecayLevel level;
    level.n = n;
    level.normalized_log = value == kNegInf ? kNegInf : (value - a_n * c_t) / a_n;
    level.chernoff = chernoff;
    r.levels.push_back(level);
  }

  r.negative = std::all_of(r.levels.begin(), r.levels.end(),
                           [](const DecayLevel& l) { return l.normalized_log < 0.0; });
  r.decreasing = true;
  for (std::size_t i = 1; i < r.levels.size(); ++i)
    r.decreasing = r.decreasing && r.levels[i].normalized_log <= r.levels[i - 1].normalized_log;
  r.chernoff_bounded = std::all_of(r.levels.begin(), r.levels.end(), [](const DecayLevel& l) {
    return l.normalized_log <= l.chernoff + 1e-9;
  });
  r.pass = r.negative && r.decreasing;
  return r;
}

std::vector<Claim> DecayReport::claims() const {
  std::vector<Claim> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const bool step_ok = i == 0 || l.normalized_log <= levels[i - 1].normalized_log;
    out.push_back({"normalized restricted log < 0 and non-increasing", l.n, l.normalized_log,
                   i == 0 ? 0.0 : std::min(0.0, levels[i - 1].normalized_log),
                   l.normalized_log < 0.0 && step_ok});
    out.push_back({"normalized restricted log <= Chernoff bound", l.n, l.normalized_log, l.chernoff,
                   l.normalized_log <= l.chernoff + 1e-9});
  }
  return out;
}

}  // namespace mixfrac
