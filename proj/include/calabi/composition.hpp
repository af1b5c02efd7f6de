#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "calabi/equiaffine.hpp"
#include "calabi/factors.hpp"

namespace calabi {

/// Ordered factors with positive weights c_a.
struct CompositionSpec {
  std::vector<FactorSpec> factors;
  std::vector<double> weights;
  std::string id;

  int K() const { return static_cast<int>(factors.size()); }
  int n() const;
  int points() const;     // r
  int spheres() const;    // s
  /// Throws std::invalid_argument unless K >= 2 and every weight is positive.
  void validate() const;
  /// c_a times the value of a point factor (1 for positive-dimensional ones).
  double effective_weight(int a) const;
};

CompositionSpec make_spec(std::vector<FactorSpec> factors, std::vector<double> weights = {},
                          std::string id = {});

/// Coordinates are t^1..t^{K-1} first, then one block per factor.
struct IndexLayout {
  int K = 0;
  int n = 0;
  std::vector<int> dims;     // n_a, a = 1..K stored at [a-1]
  std::vector<int> f;        // f[a] for a = 0..K, f[0] = 0
  std::vector<int> offsets;  // first coordinate of factor a's block, at [a-1]
  std::vector<int> ambient;  // first ambient coordinate of factor a, at [a-1]

  /// t^lambda (1-based) -> coordinate index.
  int t_index(int lambda) const { return lambda - 1; }
  /// Factor (1-based) owning coordinate i, or 0 for a t-coordinate.
  int owner(int i) const;
};

IndexLayout layout(const CompositionSpec& spec);

/// e_1..e_K as jets of the given t-jets (K-1 of them).
std::vector<Jet> weight_functions(const CompositionSpec& spec, std::span<const Jet> t);
std::vector<Jet> weight_functions(const CompositionSpec& spec, std::span<const double> t, int order);

ImmersionChart compose(const CompositionSpec& spec);

double structure_constant(const CompositionSpec& spec);
/// -1/(f_K C).
double predicted_L1(const CompositionSpec& spec);

/// Family tags of the cubic form components, see predict_all.
enum class CubicFamily : std::uint8_t {
  None = 0,      // predicted to vanish
  TTT = 1,       // A_{lambda lambda lambda}
  TTS = 2,       // A_{lambda lambda mu}, lambda < mu
  BlockPrev = 3, // A_{i j (a-1)}
  BlockNext = 4, // A_{i j lambda}, lambda >= a
  BlockOwn = 5,  // A_{i j k} inside one factor
};

struct Prediction {
  double C = 0.0;
  double L1 = 0.0;
  double H = 0.0;
  Mat g;
  Tensor3 A;
  std::vector<CubicFamily> A_family;  // same indexing as A's data
  Tensor3 Gamma;
  double c = 1.0;        // normalization constants
  double c_prime = 1.0;

  CubicFamily family(int i, int j, int k) const {
    const int n = A.dim();
    return A_family[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
};

/// Closed-form invariants of the composition at the global coordinates u.
Prediction predict_all(const CompositionSpec& spec, std::span<const double> u);

struct MeanCurvatureVectors {
  std::vector<int> factors;        // 1-based factor index of each positive-dim factor
  std::vector<Vec> closed_form;    // coordinate vectors, length n
  std::vector<Vec> from_trace;     // same, from the trace of A
  Mat pairings_closed;             // predicted g(H_a, H_b)
  Mat pairings;                    // g(H_a, H_b) with the engine metric
  double route_gap = 0.0;          // max |closed_form - from_trace|
};

/// Throws std::invalid_argument when no factor is positive dimensional.
MeanCurvatureVectors mean_curvature_vectors(const CompositionSpec& spec, std::span<const double> u,
                                            const InvariantSet& inv);
MeanCurvatureVectors mean_curvature_vectors(const CompositionSpec& spec, std::span<const double> u);

/// (c, c') with c = (prod c_a^{n_a+1})^{1/f_K}, c' = prod c_a^{n_a+1}, from the raw weights
/// (a point's value belongs to its factor x_a, not to c_a).
std::pair<double, double> normalization_constants(const CompositionSpec& spec);

/// Global coordinates -> per-factor chart coordinates.
std::vector<Vec> split_point(const IndexLayout& lay, std::span<const double> u);

/// Box for t in [-0.5, 0.5]^{K-1} and each factor's own domain.
Box sample_domain(const CompositionSpec& spec);

}  // namespace calabi
