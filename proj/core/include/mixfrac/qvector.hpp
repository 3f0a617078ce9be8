#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mixfrac {

/// Exponent vector in R^k, paired componentwise with a k-component measure.
/// Used for q, for the tilt p of the Gibbs cumulant, and for the large
/// deviation argument t.
class QVector {
 public:
  QVector() = default;
  QVector(std::initializer_list<double> values) : v_(values) {}
  explicit QVector(std::vector<double> values) : v_(std::move(values)) {}
  QVector(std::size_t k, double fill) : v_(k, fill) {}

  /// The i-th unit vector of R^k.
  static QVector unit(std::size_t k, std::size_t i) {
    QVector e(k, 0.0);
    e[i] = 1.0;
    return e;
  }

  std::size_t size() const noexcept { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }
  std::span<const double> values() const noexcept { return v_; }

  QVector plus(double s) const {
    QVector out = *this;
    for (double& x : out.v_) x += s;
    return out;
  }

  friend double dot(const QVector& a, const QVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  friend bool operator==(const QVector&, const QVector&) = default;
  friend auto operator<=>(const QVector&, const QVector&) = default;

  std::string str() const;

 private:
  std::vector<double> v_;
};

}  // namespace mixfrac
