#pragma once

#include <cstddef>
#include <vector>

namespace wrmc {

using Vec = std::vector<double>;

/// Dense square matrix, row-major. Sized for finite-state chains
/// (a handful of states), so no view/expression machinery.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double value = 0.0) : n_(n), a_(n * n, value) {}

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::size_t dim() const { return n_; }
  bool empty() const { return n_ == 0; }

  /// Row-vector product: (M h)(x) = sum_y M(x,y) h(y).
  Vec apply(const Vec& h) const {
    Vec out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * h[j];
      out[i] = s;
    }
    return out;
  }

  double row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j];
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// <nu, h> = sum_x nu(x) h(x).
inline double weighted_sum(const Vec& nu, const Vec& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) s += nu[i] * h[i];
  return s;
}

/// Variance of h under the probability vector nu.
inline double weighted_variance(const Vec& nu, const Vec& h) {
  const double m = weighted_sum(nu, h);
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) s += nu[i] * (h[i] - m) * (h[i] - m);
  return s;
}

/// Kahan compensated accumulator for long mixed-sign sums.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace wrmc
