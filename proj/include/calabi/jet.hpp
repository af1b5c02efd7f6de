#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace calabi {

inline constexpr int kMaxJetOrder = 4;

/// Monomial bookkeeping shared by every jet with the same (n_vars, order).
///
/// Monomials are stored degree-major, so the coefficients of a jet truncated
/// to a lower order are a prefix of the original coefficient vector.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  static std::shared_ptr<const JetLayout> get(int n_vars, int order);

  int n_vars() const { return n_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return degree_.size(); }
  /// Number of monomials of degree <= d.
  std::size_t prefix_size(int d) const { return degree_end_[d]; }

  int degree(std::size_t idx) const { return degree_[idx]; }
  /// alpha! for the monomial at idx.
  double factorial_weight(std::size_t idx) const { return factorial_[idx]; }
  /// Exponent of variable var in monomial idx.
  int exponent(std::size_t idx, int var) const;
  /// Index of monomial idx multiplied by variable var (requires degree < order).
  std::uint32_t raise(std::size_t idx, int var) const { return raise_[idx * n_vars_ + var]; }

  std::size_t index_of(std::span<const int> alpha) const;
  const std::vector<Product>& products() const { return products_; }

 private:
  JetLayout(int n_vars, int order);

  int n_vars_;
  int order_;
  std::vector<std::vector<int>> vars_;  // sorted variable list per monomial
  std::vector<int> degree_;
  std::vector<std::size_t> degree_end_;
  std::vector<double> factorial_;
  std::vector<std::uint32_t> raise_;
  std::vector<Product> products_;
};

/// Truncated multivariate Taylor expansion about a base point.
///
/// Coefficients are Taylor-normalized: c_alpha = (d^alpha f) / alpha!.
/// Jets are immutable values; every operation returns a new jet.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetLayout> layout);
  Jet(std::shared_ptr<const JetLayout> layout, double value);

  static Jet variable(int n_vars, int order, int var, double value);
  static Jet constant(int n_vars, int order, double value);

  int n_vars() const { return layout_->n_vars(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }
  const std::shared_ptr<const JetLayout>& layout_ptr() const { return layout_; }
  std::span<const double> coeffs() const { return c_; }

  double value() const { return c_[0]; }
  double coeff(std::span<const int> alpha) const;
  /// d^alpha f at the base point (alpha! * c_alpha).
  double derivative(std::span<const int> alpha) const;
  /// First partial derivative at the base point.
  double gradient(int var) const;

  /// d/du_var as a jet of one lower order.
  Jet partial(int var) const;
  /// Explicit truncation to a lower order.
  Jet truncate(int order) const;
  /// Same layout, value part replaced by zero.
  Jet zero_like() const { return Jet(layout_); }
  bool same_space(const Jet& other) const { return layout_ == other.layout_; }

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(const Jet& lhs, const Jet& rhs);
  friend Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
  friend Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
  friend Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
  friend Jet operator-(double lhs, const Jet& rhs) { return (-rhs) += lhs; }
  friend Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
  friend Jet operator/(double lhs, const Jet& rhs);

  friend Jet exp(const Jet& x);
  friend Jet log(const Jet& x);
  friend Jet sqrt(const Jet& x);
  friend Jet pow(const Jet& x, double p);
  friend Jet reciprocal(const Jet& x);

 private:
  // f(value + d) = sum_m derivs[m]/m! * d^m with d the non-constant part.
  Jet compose_series(std::span<const double> derivs) const;
  void check_space(const Jet& other) const;

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
};

/// One jet per coordinate: value u_i, unit slope in slot i.
std::vector<Jet> seed_point(std::span<const double> u, int order);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace calabi
