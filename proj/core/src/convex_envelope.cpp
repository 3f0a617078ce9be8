#include "mixfrac/convex_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixfrac/errors.hpp"

namespace mixfrac {
namespace {

constexpr double kEps = 1e-11;

std::vector<double> envelope_1d(std::span<const QVector> points, std::span<const double> values) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a][0] < points[b][0]; });
  // lower hull of (x, v) in x order
  std::vector<std::size_t> hull;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const double ox = points[o][0], oy = values[o];
    return (points[a][0] - ox) * (values[b] - oy) - (values[a] - oy) * (points[b][0] - ox);
  };
  for (std::size_t idx : order) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), idx) <= 0.0) hull.pop_back();
    hull.push_back(idx);
  }
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t idx : order) {
    const double x = points[idx][0];
    while (seg + 1 < hull.size() && points[hull[seg + 1]][0] <= x) ++seg;
    if (seg + 1 == hull.size() || points[hull[seg]][0] == x) {
      out[idx] = std::min(values[idx], values[hull[seg]]);
      continue;
    }
    const std::size_t a = hull[seg], b = hull[seg + 1];
    const double w = (x - points[a][0]) / (points[b][0] - points[a][0]);
    out[idx] = std::min(values[idx], (1.0 - w) * values[a] + w * values[b]);
  }
  return out;
}

// Dense tableau simplex for min c·x, A x = rhs, x >= 0.
class Simplex {
 public:
  Simplex(std::vector<std::vector<double>> a, std::vector<double> rhs, std::vector<double> cost)
      : m_(a.size()), n_(cost.size()), cost_(std::move(cost)) {
    tab_.assign(m_, std::vector<double>(n_ + m_ + 1, 0.0));
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * a[i][j];
      tab_[i][n_ + i] = 1.0;
      tab_[i][n_ + m_] = sign * rhs[i];
    }
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  double solve() {
    std::vector<double> phase1(n_ + m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = 1.0;
    run(phase1, n_ + m_);
    if (objective(phase1) > 1e-9) throw Error(ErrorCode::BadArgument, "convex envelope LP infeasible");
    // drive zero-level artificials out of the basis where possible
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(tab_[i][j]) > kEps) {
          pivot(i, j);
          break;
        }
      }
    }
    std::vector<double> phase2(n_ + m_, 0.0);
    std::copy(cost_.begin(), cost_.end(), phase2.begin());
    run(phase2, n_);
    return objective(phase2);
  }

 private:
  double objective(const std::vector<double>& c) const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) v += c[basis_[i]] * tab_[i][n_ + m_];
    return v;
  }

  // `allowed` limits the columns that may enter the basis.
  void run(const std::vector<double>& c, std::size_t allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        double r = c[j];
        for (std::size_t i = 0; i < m_; ++i) r -= c[basis_[i]] * tab_[i][j];
        if (r < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][enter] <= kEps) continue;
        const double ratio = tab_[i][n_ + m_] / tab_[i][enter];
        if (ratio < best - kEps || (ratio <= best + kEps && leave < m_ && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == m_) throw Error(ErrorCode::BadArgument, "convex envelope LP unbounded");
      pivot(leave, enter);
    }
    throw Error(ErrorCode::BadArgument, "convex envelope LP did not converge");
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = tab_[row][col];
    for (double& v : tab_[row]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
    }
    basis_[row] = col;
  }

  std::size_t m_, n_;
  std::vector<double> cost_;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
};

}  // namespace

std::vector<double> lower_convex_envelope(std::span<const QVector> points,
                                          std::span<const double> values) {
  if (points.size() != values.size() || points.empty())
    throw Error(ErrorCode::BadArgument, "envelope needs one value per point");
  const std::size_t k = points.front().size();
  if (k == 1) return envelope_1d(points, values);

  const std::size_t n = points.size();
  std::vector<std::vector<double>> a(k + 1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[j][i] = points[i][j];
    a[k][i] = 1.0;
  }
  const std::vector<double> cost(values.begin(), values.end());
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<double> rhs(k + 1);
    for (std::size_t j = 0; j < k; ++j) rhs[j] = points[p][j];
    rhs[k] = 1.0;
    out[p] = std::min(values[p], Simplex(a, rhs, cost).solve());
  }
  return out;
}

}  // namespace mixfrac
