#include <cmath>
#include <random>

#include "calabi/composition.hpp"
#include "calabi/factors.hpp"
#include "doctest.h"

using namespace calabi;

TEST_CASE("point factor") {
  const auto p = make_point_factor(2.0);
  CHECK(p.dim() == 0);
  CHECK(p.L1() == -1.0);
  CHECK_THROWS_AS(make_point_factor(0.0), std::invalid_argument);
  CHECK_THROWS(p.chart());
  const auto fi = factor_invariants(p, Vec{});
  CHECK(fi.L1 == -1.0);
  CHECK(fi.g.rows() == 0);
  const Jet unit = Jet::constant(1, 2, 0.0);
  CHECK(p.embed({}, unit)[0].value() == 2.0);
}

TEST_CASE("flat factor closed forms agree with the engine") {
  for (int n0 = 1; n0 <= 3; ++n0)
    for (double C0 : {0.5, 1.0, 3.0}) {
      const auto f = make_flat_factor(n0, C0);
      const auto cf = flat_closed_forms(n0, C0);
      std::mt19937_64 rng(n0 * 10 + static_cast<int>(C0 * 2));
      for (const auto& u : sample_box(f.domain(), 3, rng)) {
        const auto inv = compute_invariants(f.chart(), u);
        for (int i = 0; i < n0; ++i)
          for (int j = 0; j < n0; ++j) {
            CHECK(inv.frame.g(i, j) == doctest::Approx(cf.g(i, j)).epsilon(1e-10));
            for (int k = 0; k < n0; ++k) {
              CHECK(std::abs(inv.A(i, j, k) - cf.A(i, j, k)) < 1e-10);
              CHECK(std::abs(inv.Gamma(k, i, j) - cf.Gamma(k, i, j)) < 1e-10);
            }
          }
        CHECK(inv.shape.L1 == doctest::Approx(cf.L1).epsilon(1e-10));
        CHECK(inv.frame.H == doctest::Approx(cf.H).epsilon(1e-10));
        if (n0 >= 2) {
          REQUIRE(inv.J.has_value());
          CHECK(*inv.J == doctest::Approx(-cf.L1).epsilon(1e-9));
          CHECK(flat_pick_invariant(n0, C0) == doctest::Approx(-cf.L1));
        }
        double prod = 1.0;
        for (double xa : inv.x) prod *= xa;
        CHECK(prod == doctest::Approx(C0));
      }
    }
  CHECK_THROWS_AS(make_flat_factor(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_flat_factor(2, -1.0), std::invalid_argument);
}

TEST_CASE("flat example constants") {
  const auto cf = flat_closed_forms(2, 1.0);
  const double base = std::pow(1.0 / 3.0, 0.25);
  CHECK(cf.g(0, 0) == doctest::Approx(2.0 * base));
  CHECK(cf.g(1, 1) == doctest::Approx(1.5 * base));
  CHECK(cf.A(0, 0, 1) == doctest::Approx(base));
  CHECK(flat_pick_invariant(2, 1.0) == doctest::Approx(std::pow(3.0, -0.75)));
  CHECK(flat_pick_invariant(3, 2.0) == doctest::Approx(std::pow(4.0, -0.8) * std::pow(2.0, -0.4)));
  CHECK_THROWS_AS(flat_pick_invariant(1, 1.0), UndefinedError);
}

TEST_CASE("hyperboloid factor is certified") {
  for (int n = 1; n <= 3; ++n) {
    const auto h = make_hyperboloid_factor(n);
    CHECK(h.L1() == doctest::Approx(-1.0).epsilon(1e-10));
    std::mt19937_64 rng(n);
    const auto samples = sample_box(h.domain(), 20, rng);
    const auto v = classify_sphere(h.chart(), samples, 1e-9);
    CHECK(v.is_proper);
    CHECK(v.hyperbolic);
    CHECK(v.center_residual < 1e-8);
    const auto inv = compute_invariants(h.chart(), samples[0]);
    CHECK(max_abs(inv.A) < 1e-10);
    CHECK(apolarity_residual(inv).abs < 1e-10);
  }
}

TEST_CASE("flat factor equals the composition of its points") {
  for (int n0 = 1; n0 <= 3; ++n0) {
    std::vector<FactorSpec> pts(n0 + 1, make_point_factor());
    std::vector<double> w(n0 + 1, 1.0);
    w.back() = 3.0;
    const auto spec = make_spec(pts, w);
    const auto flat = make_flat_factor(n0, 3.0);
    CHECK(predicted_L1(spec) == doctest::Approx(flat.L1()).epsilon(1e-12));
    std::mt19937_64 rng(n0);
    for (const auto& u : sample_box(flat.domain(), 3, rng)) {
      const auto a = compute_invariants(flat.chart(), u);
      const auto b = compute_invariants(compose(spec), u);
      for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == doctest::Approx(b.x[i]).epsilon(1e-12));
      for (std::size_t i = 0; i < a.A.data().size(); ++i) CHECK(std::abs(a.A.data()[i] - b.A.data()[i]) < 1e-9);
    }
  }
}

TEST_CASE("composite factor of two points behaves like Flat(1,1)") {
  const auto inner = make_spec({make_point_factor(), make_point_factor()});
  const auto comp = make_composite_factor(inner);
  const auto flat = make_flat_factor(1, 1.0);
  CHECK(comp.dim() == 1);
  CHECK(comp.L1() == doctest::Approx(flat.L1()));
  const Vec u{0.2};
  const auto a = factor_invariants(comp, u);
  const auto b = factor_invariants(flat, u);
  CHECK(a.g(0, 0) == doctest::Approx(b.g(0, 0)).epsilon(1e-10));
  CHECK(std::abs(a.A(0, 0, 0) - b.A(0, 0, 0)) < 1e-10);
  CHECK(comp.describe() == "composite[point(1),point(1)]");
}
