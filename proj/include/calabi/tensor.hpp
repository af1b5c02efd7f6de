#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "calabi/linalg.hpp"

namespace calabi {

using Vec = std::vector<double>;
using Mat = Dense<double>;

inline Mat zeros(int n) { return Mat(n, n, 0.0); }

/// Cubic tensor T(i,j,k) on an n-dimensional index range.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const {
    return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }
  const std::vector<double>& data() const { return d_; }

 private:
  int n_ = 0;
  std::vector<double> d_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) {
    return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  const std::vector<double>& data() const { return d_; }

 private:
  int n_ = 0;
  std::vector<double> d_;
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
inline double max_abs(const Mat& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}
inline double max_abs(const Tensor3& t) { return max_abs(t.data()); }
inline double max_abs(const Tensor4& t) { return max_abs(t.data()); }

}  // namespace calabi
