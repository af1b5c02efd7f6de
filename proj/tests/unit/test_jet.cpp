#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "calabi/jet.hpp"
#include "doctest.h"

using calabi::Jet;
using Rational = boost::multiprecision::cpp_rational;
using Poly = std::map<std::vector<int>, Rational>;

namespace {

int degree(const std::vector<int>& a) {
  int d = 0;
  for (int e : a) d += e;
  return d;
}

Poly multiply(const Poly& p, const Poly& q, int order) {
  Poly out;
  for (const auto& [a, ca] : p)
    for (const auto& [b, cb] : q) {
      std::vector<int> c(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
      if (degree(c) <= order) out[c] += ca * cb;
    }
  return out;
}

Jet to_jet(const Poly& p, int n, int order) {
  Jet out = Jet::constant(n, order, 0.0);
  for (const auto& [a, c] : p) {
    Jet mono = Jet::constant(n, order, c.convert_to<double>());
    for (int v = 0; v < n; ++v)
      for (int e = 0; e < a[v]; ++e) mono = mono * Jet::variable(n, order, v, 0.0);
    out += mono;
  }
  return out;
}

Poly random_poly(int n, int order, std::mt19937& rng) {
  std::uniform_int_distribution<int> coeff(-7, 7);
  Poly p;
  std::vector<int> a(n, 0);
  // enumerate all exponents of degree <= order
  std::function<void(int, int)> rec = [&](int v, int left) {
    if (v == n) {
      p[a] = Rational(coeff(rng), 1 + std::abs(coeff(rng)));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      a[v] = e;
      rec(v + 1, left - e);
    }
    a[v] = 0;
  };
  rec(0, order);
  return p;
}

}  // namespace

TEST_CASE("jet products agree with exact rational polynomial arithmetic") {
  std::mt19937 rng(7);
  for (int n = 1; n <= 3; ++n)
    for (int order = 0; order <= 4; ++order) {
      const Poly p = random_poly(n, order, rng);
      const Poly q = random_poly(n, order, rng);
      const Poly pq = multiply(p, q, order);
      const Jet jp = to_jet(p, n, order);
      const Jet jq = to_jet(q, n, order);
      const Jet prod = jp * jq;
      for (const auto& [a, c] : pq) CHECK(prod.coeff(a) == doctest::Approx(c.convert_to<double>()).epsilon(1e-13));
    }
}

TEST_CASE("exp, log, sqrt and pow match closed-form Taylor coefficients") {
  const int order = 4;
  Jet x = Jet::variable(2, order, 0, 0.3);
  Jet y = Jet::variable(2, order, 1, -0.2);
  const Jet e = exp(x + y);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) {
      const std::vector<int> alpha{a, b};
      CHECK(e.coeff(alpha) == doctest::Approx(std::exp(0.1) / (std::tgamma(a + 1) * std::tgamma(b + 1))));
    }
  const Jet l = log(x);
  const std::vector<int> k3{3, 0};
  CHECK(l.coeff(k3) == doctest::Approx(1.0 / (3 * std::pow(0.3, 3))));
  const Jet s = sqrt(x);
  const Jet p = pow(x, 0.5);
  for (std::size_t i = 0; i < s.coeffs().size(); ++i) CHECK(s.coeffs()[i] == doctest::Approx(p.coeffs()[i]));
  const Jet back = s * s - x;
  for (double c : back.coeffs()) CHECK(std::abs(c) < 1e-14);
  const Jet one = reciprocal(x + 2.0 * y + 1.0) * (x + 2.0 * y + 1.0);
  CHECK(one.value() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < one.coeffs().size(); ++i) CHECK(std::abs(one.coeffs()[i]) < 1e-13);
  const Jet round = log(exp(x * y));
  const Jet direct = x * y;
  for (std::size_t i = 0; i < round.coeffs().size(); ++i)
    CHECK(round.coeffs()[i] == doctest::Approx(direct.coeffs()[i]).epsilon(1e-12));
}

TEST_CASE("derivatives, partials and truncation") {
  Jet x = Jet::variable(2, 4, 0, 1.5);
  Jet y = Jet::variable(2, 4, 1, 2.0);
  const Jet f = x * x * x * y;  // f_xxy = 6
  const std::vector<int> a{2, 1};
  CHECK(f.derivative(a) == doctest::Approx(6 * 1.5));
  CHECK(f.gradient(0) == doctest::Approx(3 * 1.5 * 1.5 * 2.0));
  const Jet fx = f.partial(0);
  CHECK(fx.order() == 3);
  CHECK(fx.value() == doctest::Approx(3 * 1.5 * 1.5 * 2.0));
  const Jet t = f.truncate(2);
  CHECK(t.order() == 2);
  for (std::size_t i = 0; i < t.coeffs().size(); ++i) CHECK(t.coeffs()[i] == f.coeffs()[i]);
  CHECK(f.truncate(4).coeffs().size() == f.coeffs().size());
}

TEST_CASE("jet errors") {
  Jet x = Jet::variable(2, 2, 0, 0.0);
  Jet z = Jet::variable(3, 2, 0, 0.0);
  CHECK_THROWS_AS(x + z, std::invalid_argument);
  CHECK_THROWS_AS(Jet::constant(1, 5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(log(x), std::domain_error);
  CHECK_THROWS_AS(reciprocal(x), std::domain_error);
  CHECK_THROWS_AS(sqrt(x - 1.0), std::domain_error);
  const std::vector<int> big{3, 0};
  CHECK_THROWS_AS(x.coeff(big), std::out_of_range);
  CHECK_THROWS_AS(x.truncate(3), std::invalid_argument);
}
