#pragma once

#include <random>

#include "calabi/composition.hpp"

namespace calabi::testing {

// One of Point, Flat(n0 <= 3), Hyperboloid(n <= 2).
inline FactorSpec random_leaf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(0.5, 2.0), c0(0.5, 3.0);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      return make_point_factor(val(rng));
    case 1:
      return make_flat_factor(std::uniform_int_distribution<int>(1, 3)(rng), c0(rng));
    default:
      return make_hyperboloid_factor(std::uniform_int_distribution<int>(1, 2)(rng));
  }
}

// K in 2..4, c_a in [0.5, 3], at most one level of nesting; rejects n > max_n
// so the order-4 jets stay cheap.
inline CompositionSpec random_spec(std::mt19937_64& rng, int max_n = 9) {
  std::uniform_real_distribution<double> weight(0.5, 3.0), coin(0.0, 1.0);
  for (;;) {
    const int K = std::uniform_int_distribution<int>(2, 4)(rng);
    std::vector<FactorSpec> fs;
    std::vector<double> w;
    for (int a = 0; a < K; ++a) {
      if (coin(rng) < 0.2) {
        const int k = std::uniform_int_distribution<int>(2, 3)(rng);
        std::vector<FactorSpec> inner;
        std::vector<double> iw;
        for (int b = 0; b < k; ++b) {
          inner.push_back(random_leaf(rng));
          iw.push_back(weight(rng));
        }
        fs.push_back(make_composite_factor(make_spec(inner, iw)));
      } else {
        fs.push_back(random_leaf(rng));
      }
      w.push_back(weight(rng));
    }
    auto spec = make_spec(fs, w);
    if (spec.n() <= max_n) return spec;
  }
}

inline bool is_flat_like(const FactorSpec& f);

inline bool only_flat_factors(const CompositionSpec& spec) {
  for (const auto& f : spec.factors)
    if (!is_flat_like(f)) return false;
  return true;
}

// Points, flat factors, and composites built from them only.
inline bool is_flat_like(const FactorSpec& f) {
  if (f.is_point() || std::holds_alternative<FlatFactor>(f.kind())) return true;
  if (const auto* c = std::get_if<CompositeFactor>(&f.kind())) return only_flat_factors(*c->inner);
  return false;
}

}  // namespace calabi::testing
