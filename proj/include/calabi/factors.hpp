#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "calabi/equiaffine.hpp"

namespace calabi {

struct CompositionSpec;

/// 0-dimensional factor: the positive number `value` on the real line.
struct PointFactor {
  double value = 1.0;
};
/// x^1 ... x^{n0+1} = C0, in exponential coordinates.
struct FlatFactor {
  int n0 = 1;
  double C0 = 1.0;
};
/// Upper sheet of the unit quadric, rescaled so that L1 = -1.
struct HyperboloidFactor {
  int n = 1;
};
/// A composition used as a factor of a bigger one.
struct CompositeFactor {
  std::shared_ptr<const CompositionSpec> inner;
};

using FactorKind = std::variant<PointFactor, FlatFactor, HyperboloidFactor, CompositeFactor>;

class FactorSpec {
 public:
  explicit FactorSpec(FactorKind kind);

  const FactorKind& kind() const { return kind_; }
  bool is_point() const { return std::holds_alternative<PointFactor>(kind_); }
  int dim() const { return dim_; }
  /// Closed form (point, flat, composite) or certified value (hyperboloid).
  double L1() const { return L1_; }
  /// Chart of a positive-dimensional factor; throws for points.
  const ImmersionChart& chart() const;
  Box domain() const;
  std::string describe() const;

  /// Ambient block of the factor given its own coordinate jets. `unit` is any
  /// jet in the caller's layout (needed for points, which have no coordinates).
  std::vector<Jet> embed(std::span<const Jet> coords, const Jet& unit) const;

 private:
  FactorKind kind_;
  int dim_ = 0;
  double L1_ = -1.0;
  std::shared_ptr<const ImmersionChart> chart_;
};

FactorSpec make_point_factor(double value = 1.0);
FactorSpec make_flat_factor(int n0, double C0);
FactorSpec make_hyperboloid_factor(int n);
FactorSpec make_composite_factor(const CompositionSpec& inner);

/// Scale mu of the hyperboloid chart mu * (u, sqrt(1 + |u|^2)) giving L1 = -1.
double hyperboloid_scale(int n);

/// Invariants of a factor at a point of its chart.
struct FactorInvariants {
  int n = 0;
  double L1 = -1.0;
  double H = 1.0;
  Mat g;
  Tensor3 A;
  Tensor3 Gamma;  // induced connection
  bool closed_form = false;
};

FactorInvariants factor_invariants(const FactorSpec& f, std::span<const double> u);

/// Closed forms of the flat factor; they do not depend on the chart point.
FactorInvariants flat_closed_forms(int n0, double C0);
/// Pick invariant of the flat factor, n0 >= 2.
double flat_pick_invariant(int n0, double C0);

}  // namespace calabi
