#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "calabi/jet.hpp"

namespace calabi {

/// Row-major dense matrix over double or Jet.
template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LU factorization with partial pivoting on the value part.
template <class T>
class LuFactor {
 public:
  /// Throws SingularMatrixError if a pivot falls below rel_tol times the largest entry.
  explicit LuFactor(Dense<T> m, double rel_tol = 1e-14) : lu_(std::move(m)) {
    const std::size_t n = lu_.rows();
    if (n != lu_.cols()) throw std::invalid_argument("LU of a non-square matrix");
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(lu_(i, j))));
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(value_of(lu_(k, k)));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double cand = std::abs(value_of(lu_(i, k)));
        if (cand > best) {
          best = cand;
          piv = i;
        }
      }
      if (!(best > rel_tol * scale) || best == 0.0)
        throw SingularMatrixError("matrix is numerically singular");
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        sign_ = -sign_;
      }
      const T inv = reciprocal_of(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        lu_(i, k) = lu_(i, k) * inv;
        const T f = lu_(i, k);
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }

  T determinant() const {
    T d = lu_(0, 0);
    for (std::size_t k = 1; k < size(); ++k) d = d * lu_(k, k);
    return sign_ > 0 ? d : -d;
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    const std::size_t n = size();
    std::vector<T> x;
    x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) x.push_back(b[perm_[i]]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] = x[i] / lu_(i, i);
    }
    return x;
  }

  /// Solves A^T y = b.
  std::vector<T> solve_transposed(const std::vector<T>& b) const {
    const std::size_t n = size();
    std::vector<T> z(b);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) z[i] -= lu_(j, i) * z[j];
      z[i] = z[i] / lu_(i, i);
    }
    for (std::size_t i = n; i-- > 0;)
      for (std::size_t j = i + 1; j < n; ++j) z[i] -= lu_(j, i) * z[j];
    std::vector<T> y(z);
    for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = z[i];
    return y;
  }

  Dense<T> inverse() const {
    const std::size_t n = size();
    const T zero = lu_(0, 0) * 0.0;
    Dense<T> inv(n, n, zero);
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<T> e(n, zero);
      e[c] += 1.0;
      auto col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
  }

 private:
  static double reciprocal_of(double x) { return 1.0 / x; }
  static Jet reciprocal_of(const Jet& x) { return reciprocal(x); }

  Dense<T> lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

/// Determinant that tolerates exactly singular double matrices (returns 0).
double determinant(const Dense<double>& m);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(Dense<double> m);

/// Lower Cholesky factor; returns false if the matrix is not positive definite.
bool cholesky(const Dense<double>& m, Dense<double>& lower);

}  // namespace calabi
