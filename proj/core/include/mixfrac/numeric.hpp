#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace mixfrac {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf acts as the additive identity.
inline double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(args[i])) with the running max factored out.
// Returns -inf for an empty range or when every argument is -inf.
inline double log_sum_exp(std::span<const double> args) noexcept {
  double hi = kNegInf;
  for (double v : args) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : args) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// Streaming variant: accumulates terms one at a time, rescaling when a new
// maximum appears. Summation order is the insertion order.
class LogSumAccumulator {
 public:
  void add(double v) noexcept {
    if (v == kNegInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const noexcept { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }
  bool empty() const noexcept { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// Ordinary least-squares slope of y on x.
inline double lsq_slope(std::span<const double> x, std::span<const double> y) noexcept {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace mixfrac
