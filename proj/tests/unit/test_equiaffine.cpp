#include <cmath>
#include <random>

#include "calabi/equiaffine.hpp"
#include "doctest.h"

using namespace calabi;

namespace {

ImmersionChart hyperbola() {
  ImmersionChart c;
  c.dim = 1;
  c.name = "hyperbola";
  c.domain = {{-1.0}, {1.0}};
  c.map = [](std::span<const Jet> u) { return std::vector<Jet>{exp(u[0]), exp(-u[0])}; };
  return c;
}

ImmersionChart titeica() {
  ImmersionChart c;
  c.dim = 2;
  c.name = "titeica";
  c.domain = {{-0.5, -0.5}, {0.5, 0.5}};
  c.map = [](std::span<const Jet> u) {
    return std::vector<Jet>{exp(u[0]), exp(u[1]), exp(-u[0] - u[1])};
  };
  return c;
}

ImmersionChart paraboloid() {
  ImmersionChart c;
  c.dim = 2;
  c.name = "paraboloid";
  c.domain = {{-1, -1}, {1, 1}};
  c.map = [](std::span<const Jet> u) {
    return std::vector<Jet>{u[0], u[1], 0.5 * (u[0] * u[0] + u[1] * u[1])};
  };
  return c;
}

// A generic convex graph: not an affine sphere.
ImmersionChart bumpy() {
  ImmersionChart c;
  c.dim = 2;
  c.name = "bumpy";
  c.domain = {{-0.4, -0.4}, {0.4, 0.4}};
  c.map = [](std::span<const Jet> u) {
    const Jet& a = u[0];
    const Jet& b = u[1];
    return std::vector<Jet>{a, b, exp(a) + b * b + 0.3 * a * b * b + 0.2 * b * b * b * b};
  };
  return c;
}

ImmersionChart saddle3() {
  ImmersionChart c;
  c.dim = 3;
  c.name = "saddle3";
  c.domain = {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}};
  c.map = [](std::span<const Jet> u) {
    return std::vector<Jet>{u[0], u[1], u[2],
                            u[0] * u[0] + 0.5 * u[1] * u[1] - u[2] * u[2] + 0.2 * u[0] * u[1] * u[2] +
                                0.1 * exp(u[0] + u[2])};
  };
  return c;
}

}  // namespace

TEST_CASE("hyperbola: metric, normal and shape operator") {
  const Vec u{0.3};
  const auto inv = compute_invariants(hyperbola(), u);
  CHECK(inv.frame.h(0, 0) == doctest::Approx(2.0));
  CHECK(inv.frame.g(0, 0) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)));
  CHECK(inv.shape.L1 == doctest::Approx(-std::pow(2.0, -2.0 / 3.0)));
  CHECK(std::abs(inv.Gamma(0, 0, 0)) < 1e-12);
  CHECK(std::abs(inv.A(0, 0, 0)) < 1e-12);
  CHECK(!inv.J.has_value());
  for (int a = 0; a < 2; ++a) CHECK(inv.xi[a] == doctest::Approx(-inv.shape.L1 * inv.x[a]));
  CHECK(inv.normal_coefficient < 1e-12);
  CHECK_THROWS_AS(pick_invariant(inv.frame, inv.A), UndefinedError);
}

TEST_CASE("Titeica surface is a proper hyperbolic sphere with nonzero cubic form") {
  std::mt19937_64 rng(1);
  const auto samples = sample_box(titeica().domain, 8, rng);
  const auto v = classify_sphere(titeica(), samples, 1e-9);
  CHECK(v.is_proper);
  CHECK(v.hyperbolic);
  const auto inv = compute_invariants(titeica(), samples[0]);
  CHECK(max_abs(inv.A) > 0.1);
  REQUIRE(inv.J.has_value());
  CHECK(*inv.J > 0.0);
  CHECK(apolarity_residual(inv).rel < 1e-10);
  CHECK(sphere_gauss_residual(inv).rel < 1e-9);
  CHECK(codazzi_residual(inv).rel < 1e-9);
}

TEST_CASE("paraboloid is an improper sphere and is rejected as proper") {
  const Vec u{0.2, -0.1};
  const auto inv = compute_invariants(paraboloid(), u);
  CHECK(std::abs(inv.shape.L1) < 1e-12);
  CHECK(max_abs(inv.A) < 1e-12);
  std::vector<Vec> samples{{0.1, 0.2}, {-0.3, 0.1}, {0.0, 0.5}};
  const auto v = classify_sphere(paraboloid(), samples, 1e-8);
  CHECK(!v.is_proper);
}

TEST_CASE("structure equations hold on charts that are not spheres") {
  std::mt19937_64 rng(5);
  for (const auto& chart : {bumpy(), saddle3()}) {
    for (const auto& u : sample_box(chart.domain, 4, rng)) {
      const auto inv = compute_invariants(chart, u);
      CHECK(apolarity_residual(inv).rel < 1e-10);
      CHECK(trace_identity_residual(inv).rel < 1e-9);
      CHECK(codazzi_residual(inv).rel < 1e-9);
      CHECK(gauss_residual(inv).rel < 1e-9);
      CHECK(inv.route_mismatch < 1e-10);
      CHECK(inv.normal_coefficient < 1e-10);
    }
    const auto v = classify_sphere(chart, sample_box(chart.domain, 5, rng), 1e-6);
    CHECK(!v.is_proper);
  }
}

TEST_CASE("indefinite metrics are flagged but still analysed") {
  const Vec u{0.1, 0.05, -0.1};
  const auto inv = compute_invariants(saddle3(), u);
  CHECK(inv.frame.indefinite);
  CHECK(inv.shape.eigenvalues.empty());
}

TEST_CASE("equiaffine invariance and scaling") {
  const Vec u{0.1, -0.2};
  const auto base = compute_invariants(bumpy(), u);
  Mat T(3, 3, 0.0);
  T(0, 0) = 2.0; T(0, 1) = 1.0; T(0, 2) = 0.3;
  T(1, 0) = 0.5; T(1, 1) = 1.0; T(1, 2) = -0.2;
  T(2, 0) = 0.0; T(2, 1) = 0.1; T(2, 2) = 1.0;
  const double d = determinant(T);
  for (int j = 0; j < 3; ++j) T(0, j) /= d;  // unimodular
  const auto moved = compute_invariants(transformed(bumpy(), T), u);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(moved.frame.g(i, j) == doctest::Approx(base.frame.g(i, j)).epsilon(1e-10));
  CHECK(moved.shape.L1 == doctest::Approx(base.shape.L1).epsilon(1e-9));
  const double mu = 1.7;
  const auto big = compute_invariants(scaled(bumpy(), mu), u);
  CHECK(big.frame.g(0, 0) == doctest::Approx(std::pow(mu, 2.0 * 3 / 4) * base.frame.g(0, 0)));
  CHECK(big.shape.L1 == doctest::Approx(std::pow(mu, -2.0 * 3 / 4) * base.shape.L1));
}

TEST_CASE("degenerate charts are rejected") {
  ImmersionChart flat;
  flat.dim = 2;
  flat.name = "plane";
  flat.map = [](std::span<const Jet> u) { return std::vector<Jet>{u[0], u[1], u[0] + u[1]}; };
  const Vec u{0.1, 0.2};
  CHECK_THROWS_AS(compute_invariants(flat, u), DegenerateError);
  ImmersionChart cyl;
  cyl.dim = 2;
  cyl.name = "cylinder";
  cyl.map = [](std::span<const Jet> u) { return std::vector<Jet>{u[0], u[1], u[0] * u[0] + 0.0 * u[1]}; };
  CHECK_THROWS_AS(compute_invariants(cyl, u), DegenerateError);
  const Vec wrong{0.1};
  CHECK_THROWS_AS(compute_invariants(flat, wrong), std::invalid_argument);
}
