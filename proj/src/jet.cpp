#include "calabi/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace calabi {
namespace {

std::uint64_t pack(const std::vector<int>& vars) {
  // 12 bits per slot plus the degree; order <= 4 keeps this in 51 bits.
  std::uint64_t key = vars.size();
  for (int v : vars) key = (key << 12) | static_cast<std::uint64_t>(v + 1);
  return key;
}

void enumerate(int n_vars, int degree, int first, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == degree) {
    out.push_back(cur);
    return;
  }
  for (int v = first; v < n_vars; ++v) {
    cur.push_back(v);
    enumerate(n_vars, degree, v, cur, out);
    cur.pop_back();
  }
}

}  // namespace

JetLayout::JetLayout(int n_vars, int order) : n_vars_(n_vars), order_(order) {
  std::vector<int> cur;
  for (int d = 0; d <= order; ++d) {
    enumerate(n_vars, d, 0, cur, vars_);
    degree_end_.push_back(vars_.size());
  }
  const std::size_t count = vars_.size();
  degree_.resize(count);
  factorial_.resize(count);
  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  lookup.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& vs = vars_[i];
    degree_[i] = static_cast<int>(vs.size());
    double w = 1.0;
    std::size_t run = 0;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      run = (k > 0 && vs[k] == vs[k - 1]) ? run + 1 : 1;
      w *= static_cast<double>(run);
    }
    factorial_[i] = w;
    lookup.emplace(pack(vs), static_cast<std::uint32_t>(i));
  }

  const std::size_t below_top = order > 0 ? degree_end_[order - 1] : 0;
  raise_.assign(below_top * n_vars, 0);
  for (std::size_t i = 0; i < below_top; ++i) {
    for (int v = 0; v < n_vars; ++v) {
      std::vector<int> up = vars_[i];
      up.insert(std::upper_bound(up.begin(), up.end(), v), v);
      raise_[i * n_vars + v] = lookup.at(pack(up));
    }
  }

  for (std::size_t a = 0; a < count; ++a) {
    const int room = order - degree_[a];
    for (std::size_t b = 0; b < degree_end_[room]; ++b) {
      std::vector<int> merged;
      merged.reserve(degree_[a] + degree_[b]);
      std::merge(vars_[a].begin(), vars_[a].end(), vars_[b].begin(), vars_[b].end(),
                 std::back_inserter(merged));
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           lookup.at(pack(merged))});
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int n_vars, int order) {
  if (order < 0 || order > kMaxJetOrder)
    throw std::invalid_argument("jet order must lie in [0, 4], got " + std::to_string(order));
  if (n_vars < 1 || n_vars > 4000)
    throw std::invalid_argument("jet variable count must be positive, got " +
                                std::to_string(n_vars));
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n_vars, order}];
  if (!slot) slot.reset(new JetLayout(n_vars, order));
  return slot;
}

int JetLayout::exponent(std::size_t idx, int var) const {
  const auto& vs = vars_[idx];
  return static_cast<int>(std::count(vs.begin(), vs.end(), var));
}

std::size_t JetLayout::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_vars_)
    throw std::invalid_argument("multi-index length does not match jet variable count");
  std::vector<int> vs;
  for (int v = 0; v < n_vars_; ++v) {
    if (alpha[v] < 0) throw std::invalid_argument("negative multi-index entry");
    vs.insert(vs.end(), alpha[v], v);
  }
  if (static_cast<int>(vs.size()) > order_)
    throw std::out_of_range("multi-index degree " + std::to_string(vs.size()) +
                            " exceeds jet order " + std::to_string(order_));
  // Monomials are sorted lexicographically within each degree block.
  const std::size_t lo = vs.empty() ? 0 : degree_end_[vs.size() - 1];
  const std::size_t hi = degree_end_[vs.size()];
  auto it = std::lower_bound(vars_.begin() + lo, vars_.begin() + hi, vs);
  return static_cast<std::size_t>(it - vars_.begin());
}

Jet::Jet(std::shared_ptr<const JetLayout> layout)
    : layout_(std::move(layout)), c_(layout_->size(), 0.0) {}

Jet::Jet(std::shared_ptr<const JetLayout> layout, double value) : Jet(std::move(layout)) {
  c_[0] = value;
}

Jet Jet::variable(int n_vars, int order, int var, double value) {
  if (var < 0 || var >= n_vars) throw std::out_of_range("variable index out of range");
  Jet j(JetLayout::get(n_vars, order), value);
  if (order >= 1) j.c_[1 + var] = 1.0;
  return j;
}

Jet Jet::constant(int n_vars, int order, double value) {
  return Jet(JetLayout::get(n_vars, order), value);
}

double Jet::coeff(std::span<const int> alpha) const { return c_[layout_->index_of(alpha)]; }

double Jet::derivative(std::span<const int> alpha) const {
  const std::size_t idx = layout_->index_of(alpha);
  return c_[idx] * layout_->factorial_weight(idx);
}

double Jet::gradient(int var) const {
  if (order() < 1) throw std::out_of_range("gradient of an order-0 jet");
  return c_[1 + var];
}

Jet Jet::partial(int var) const {
  if (order() < 1) throw std::out_of_range("cannot differentiate an order-0 jet");
  if (var < 0 || var >= n_vars()) throw std::out_of_range("variable index out of range");
  Jet out(JetLayout::get(n_vars(), order() - 1));
  const std::size_t m = out.c_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t up = layout_->raise(i, var);
    out.c_[i] = c_[up] * static_cast<double>(layout_->exponent(up, var));
  }
  return out;
}

Jet Jet::truncate(int new_order) const {
  if (new_order > order()) throw std::invalid_argument("truncate cannot raise jet order");
  Jet out(JetLayout::get(n_vars(), new_order));
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

void Jet::check_space(const Jet& other) const {
  if (layout_ != other.layout_)
    throw std::invalid_argument("jet operands differ in variable count or order");
}

Jet Jet::operator-() const {
  Jet out(*this);
  for (double& v : out.c_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  check_space(rhs);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_space(rhs);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet& Jet::operator+=(double rhs) {
  c_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  c_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (double& v : c_) v *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  for (double& v : c_) v /= rhs;
  return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs) {
  lhs.check_space(rhs);
  Jet out(lhs.layout_);
  const double* a = lhs.c_.data();
  const double* b = rhs.c_.data();
  double* r = out.c_.data();
  for (const auto& p : lhs.layout_->products()) r[p.out] += a[p.lhs] * b[p.rhs];
  return out;
}

Jet Jet::compose_series(std::span<const double> derivs) const {
  Jet delta(*this);
  delta.c_[0] = 0.0;
  Jet out(layout_, derivs[0]);
  Jet power(layout_, 1.0);
  double fact = 1.0;
  for (int m = 1; m <= order(); ++m) {
    power = power * delta;
    fact *= m;
    const double w = derivs[m] / fact;
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += w * power.c_[i];
  }
  return out;
}

Jet reciprocal(const Jet& x) {
  const double v = x.value();
  if (v == 0.0) throw std::domain_error("division by a jet with zero value part");
  double d[kMaxJetOrder + 1];
  double term = 1.0 / v;
  for (int m = 0; m <= x.order(); ++m) {
    d[m] = term;
    term *= -static_cast<double>(m + 1) / v;
  }
  return x.compose_series({d, static_cast<std::size_t>(x.order() + 1)});
}

Jet operator/(const Jet& lhs, const Jet& rhs) { return lhs * reciprocal(rhs); }

Jet operator/(double lhs, const Jet& rhs) { return reciprocal(rhs) *= lhs; }

Jet exp(const Jet& x) {
  double d[kMaxJetOrder + 1];
  std::fill_n(d, kMaxJetOrder + 1, std::exp(x.value()));
  return x.compose_series({d, static_cast<std::size_t>(x.order() + 1)});
}

Jet log(const Jet& x) {
  const double v = x.value();
  if (!(v > 0.0)) throw std::domain_error("log of a jet with nonpositive value part");
  double d[kMaxJetOrder + 1];
  d[0] = std::log(v);
  double term = 1.0 / v;
  for (int m = 1; m <= x.order(); ++m) {
    d[m] = term;
    term *= -static_cast<double>(m) / v;
  }
  return x.compose_series({d, static_cast<std::size_t>(x.order() + 1)});
}

Jet pow(const Jet& x, double p) {
  const double v = x.value();
  if (!(v > 0.0)) throw std::domain_error("real power of a jet with nonpositive value part");
  double d[kMaxJetOrder + 1];
  double falling = 1.0;
  for (int m = 0; m <= x.order(); ++m) {
    d[m] = falling * std::pow(v, p - m);
    falling *= (p - m);
  }
  return x.compose_series({d, static_cast<std::size_t>(x.order() + 1)});
}

Jet sqrt(const Jet& x) {
  if (!(x.value() > 0.0)) throw std::domain_error("sqrt of a jet with nonpositive value part");
  return pow(x, 0.5);
}

std::vector<Jet> seed_point(std::span<const double> u, int order) {
  const int n = static_cast<int>(u.size());
  auto layout = JetLayout::get(n, order);
  std::vector<Jet> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(u[i])) throw std::invalid_argument("seed point must be finite");
    out.push_back(Jet::variable(n, order, i, u[i]));
  }
  return out;
}

}  // namespace calabi
