#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "calabi/jet.hpp"
#include "calabi/tensor.hpp"

namespace calabi {

class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SingularFrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class RouteMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonTangentialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box of chart coordinates used for sampling.
struct Box {
  Vec lo;
  Vec hi;
};

/// A hypersurface chart u -> x(u) in R^{n+1}, evaluated on jets.
///
/// `map` receives one jet per chart coordinate (all sharing a layout) and must
/// return the n+1 ambient coordinates in that same layout. Working on jets
/// rather than doubles lets charts nest: a composed chart passes sub-spans of
/// its own coordinate jets to the factor charts.
struct ImmersionChart {
  int dim = 0;
  std::function<std::vector<Jet>(std::span<const Jet>)> map;
  Box domain;
  std::string name;

  std::vector<Jet> evaluate(std::span<const double> u, int order) const;
  Vec position(std::span<const double> u) const;
};

/// x -> T x for a constant (n+1)x(n+1) matrix T.
ImmersionChart transformed(const ImmersionChart& chart, const Mat& T);
/// x -> mu * x.
ImmersionChart scaled(const ImmersionChart& chart, double mu);

struct MetricFrame {
  int n = 0;
  Mat h;      // sign-normalized determinant form
  double H = 0.0;
  Mat g;
  Mat g_inv;
  double sqrt_detG = 0.0;
  int sign_flip = 1;
  bool indefinite = false;
};

struct ShapeOperator {
  Mat B;            // B_ij
  Mat mixed;        // mixed(k, i) = B^k_i
  Vec eigenvalues;  // empty when g is indefinite
  double L1 = 0.0;
  /// max |eigenvalue - L1|, or max |B^k_i - L1 delta| without eigenvalues.
  double spread = 0.0;
};

/// Every equiaffine invariant of a chart at one point.
///
/// Index conventions: Gamma(k,i,j) = Gamma^k_ij, A(i,j,k) = A_ijk,
/// R(l,i,j,k) = l-component of R(d_i,d_j)d_k, nablaA(i,j,k,l) = A_ijk,l.
struct InvariantSet {
  int n = 0;
  Vec x;
  Vec xi;
  MetricFrame frame;
  Tensor3 Gamma;
  Tensor3 Gamma_LC;
  Tensor3 A;
  ShapeOperator shape;
  std::optional<double> J;
  Tensor4 R;
  Tensor4 nablaA;

  // Diagnostics of the internal consistency of the decomposition.
  double route_mismatch = 0.0;       // cubic form: connection route vs h_ijk route
  double normal_coefficient = 0.0;   // max |kappa_ij - g_ij| in x_ij = Gamma x_k + kappa xi
  double normal_component = 0.0;     // max |rho_i| in d_i xi = -B x + rho xi
};

struct AnalysisOptions {
  double degeneracy_tol = 1e-12;
  double route_tol = 1e-9;
  double tangential_tol = 1e-8;
};

MetricFrame blaschke_data(const ImmersionChart& chart, std::span<const double> u);
Vec affine_normal_field(const ImmersionChart& chart, std::span<const double> u);
Tensor3 induced_connection(const ImmersionChart& chart, std::span<const double> u);
Tensor3 fubini_pick_form(const ImmersionChart& chart, std::span<const double> u);
ShapeOperator shape_operator(const ImmersionChart& chart, std::span<const double> u);
double pick_invariant(const MetricFrame& frame, const Tensor3& A);
Tensor4 nabla_A(const ImmersionChart& chart, std::span<const double> u);
Tensor4 curvature_tensor(const ImmersionChart& chart, std::span<const double> u);

InvariantSet compute_invariants(const ImmersionChart& chart, std::span<const double> u,
                                const AnalysisOptions& opts = {});

struct SphereVerdict {
  bool is_proper = false;
  bool hyperbolic = false;
  double L1 = 0.0;
  double max_spread = 0.0;        // relative to |L1|
  double l1_variation = 0.0;      // (max - min) / |mean|
  double center_residual = 0.0;   // |xi + L1 x| / |xi|
  std::string failure;
};

SphereVerdict classify_sphere(const ImmersionChart& chart, std::span<const Vec> samples,
                              double tol);

/// Residual of an identity, absolute and relative to the natural scale of its terms.
struct Residual {
  double abs = 0.0;
  double rel = 0.0;
};

Residual apolarity_residual(const InvariantSet& inv);
Residual trace_identity_residual(const InvariantSet& inv);
Residual codazzi_residual(const InvariantSet& inv);
/// Gauss equation with B = L1 g (affine spheres).
Residual sphere_gauss_residual(const InvariantSet& inv);
/// Gauss equation with the computed shape operator.
Residual gauss_residual(const InvariantSet& inv);

/// Uniform samples from a box, deterministic in the generator state.
template <class Rng>
std::vector<Vec> sample_box(const Box& box, int count, Rng& rng) {
  std::vector<Vec> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < count; ++s) {
    Vec u(box.lo.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace calabi
