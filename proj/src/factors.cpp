#include "calabi/factors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "calabi/composition.hpp"

namespace calabi {

namespace {

ImmersionChart flat_chart(int n0, double C0) {
  ImmersionChart c;
  c.dim = n0;
  c.name = "flat";
  c.domain = {Vec(n0, -0.5), Vec(n0, 0.5)};
  c.map = [n0, C0](std::span<const Jet> t) {
    // all-points layout: f_a = a
    std::vector<Jet> out;
    for (int a = 1; a <= n0 + 1; ++a) {
      Jet expo = t[0].zero_like();
      if (a >= 2) expo -= t[a - 2];
      for (int lam = a; lam <= n0; ++lam) expo += t[lam - 1] / static_cast<double>(lam);
      out.push_back(exp(expo));
    }
    out.back() *= C0;
    return out;
  };
  return c;
}

ImmersionChart quadric_chart(int n, double mu) {
  ImmersionChart c;
  c.dim = n;
  c.name = "hyperboloid";
  c.domain = {Vec(n, -1.0), Vec(n, 1.0)};
  c.map = [n, mu](std::span<const Jet> u) {
    std::vector<Jet> out;
    Jet r2 = u[0].zero_like() + 1.0;
    for (int i = 0; i < n; ++i) {
      out.push_back(u[i] * mu);
      r2 += u[i] * u[i];
    }
    out.push_back(sqrt(r2) * mu);
    return out;
  };
  return c;
}

struct HyperboloidData {
  double mu = 1.0;
  double L1 = -1.0;
};

HyperboloidData hyperboloid_data(int n) {
  static std::mutex mtx;
  static std::map<int, HyperboloidData> cache;
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  const Vec origin(n, 0.0);
  auto residual = [&](double log_mu) {
    const auto inv = compute_invariants(quadric_chart(n, std::exp(log_mu)), origin);
    return std::log(-inv.shape.L1);
  };
  // secant in log mu; log(-L1) is affine in log mu so this settles fast
  double a = 0.0, b = 0.5;
  double fa = residual(a), fb = residual(b);
  for (int it = 0; it < 50 && std::abs(fb) > 1e-15; ++it) {
    const double c = b - fb * (b - a) / (fb - fa);
    a = b;
    fa = fb;
    b = c;
    fb = residual(b);
  }
  HyperboloidData d;
  d.mu = std::exp(b);
  const auto chart = quadric_chart(n, d.mu);
  std::mt19937_64 rng(20240601u + n);
  const auto samples = sample_box(chart.domain, 20, rng);
  const auto verdict = classify_sphere(chart, samples, 1e-9);
  if (!verdict.is_proper || !verdict.hyperbolic)
    throw std::logic_error("hyperboloid certification failed: " + verdict.failure);
  d.L1 = verdict.L1;
  cache.emplace(n, d);
  return d;
}

}  // namespace

FactorSpec::FactorSpec(FactorKind kind) : kind_(std::move(kind)) {
  if (auto* p = std::get_if<PointFactor>(&kind_)) {
    if (!(p->value > 0.0) || !std::isfinite(p->value))
      throw std::invalid_argument("point factor needs a positive value");
    dim_ = 0;
    L1_ = -1.0;
  } else if (auto* fl = std::get_if<FlatFactor>(&kind_)) {
    if (fl->n0 < 1) throw std::invalid_argument("flat factor needs n0 >= 1");
    if (!(fl->C0 > 0.0) || !std::isfinite(fl->C0)) throw std::invalid_argument("flat factor needs C0 > 0");
    dim_ = fl->n0;
    L1_ = -std::pow(fl->n0 + 1.0, -(fl->n0 + 1.0) / (fl->n0 + 2.0)) * std::pow(fl->C0, -2.0 / (fl->n0 + 2.0));
    chart_ = std::make_shared<ImmersionChart>(flat_chart(fl->n0, fl->C0));
  } else if (auto* hy = std::get_if<HyperboloidFactor>(&kind_)) {
    if (hy->n < 1) throw std::invalid_argument("hyperboloid factor needs n >= 1");
    const auto d = hyperboloid_data(hy->n);
    dim_ = hy->n;
    L1_ = d.L1;
    chart_ = std::make_shared<ImmersionChart>(quadric_chart(hy->n, d.mu));
  } else {
    const auto& co = std::get<CompositeFactor>(kind_);
    if (!co.inner) throw std::invalid_argument("composite factor without inner spec");
    co.inner->validate();
    dim_ = co.inner->n();
    L1_ = predicted_L1(*co.inner);
    auto ch = compose(*co.inner);
    ch.name = "composite";
    chart_ = std::make_shared<ImmersionChart>(std::move(ch));
  }
}

const ImmersionChart& FactorSpec::chart() const {
  if (!chart_) throw std::logic_error("point factors have no chart");
  return *chart_;
}

Box FactorSpec::domain() const {
  if (!chart_) return {};
  return chart_->domain;
}

std::string FactorSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PointFactor>) {
          os << "point(" << k.value << ")";
        } else if constexpr (std::is_same_v<T, FlatFactor>) {
          os << "flat(" << k.n0 << "," << k.C0 << ")";
        } else if constexpr (std::is_same_v<T, HyperboloidFactor>) {
          os << "hyperboloid(" << k.n << ")";
        } else {
          os << "composite[";
          for (int a = 0; a < k.inner->K(); ++a)
            os << (a ? "," : "") << k.inner->factors[a].describe();
          os << "]";
        }
      },
      kind_);
  return os.str();
}

std::vector<Jet> FactorSpec::embed(std::span<const Jet> coords, const Jet& unit) const {
  if (const auto* p = std::get_if<PointFactor>(&kind_)) return {unit.zero_like() + p->value};
  return chart_->map(coords);
}

FactorSpec make_point_factor(double value) { return FactorSpec(PointFactor{value}); }
FactorSpec make_flat_factor(int n0, double C0) { return FactorSpec(FlatFactor{n0, C0}); }
FactorSpec make_hyperboloid_factor(int n) { return FactorSpec(HyperboloidFactor{n}); }
FactorSpec make_composite_factor(const CompositionSpec& inner) {
  return FactorSpec(CompositeFactor{std::make_shared<const CompositionSpec>(inner)});
}

double hyperboloid_scale(int n) { return hyperboloid_data(n).mu; }

FactorInvariants flat_closed_forms(int n0, double C0) {
  if (n0 < 1 || !(C0 > 0.0)) throw std::invalid_argument("flat factor needs n0 >= 1 and C0 > 0");
  FactorInvariants out;
  out.n = n0;
  out.closed_form = true;
  const double base = std::pow(C0 * C0 / (n0 + 1.0), 1.0 / (n0 + 2.0));
  out.L1 = -std::pow(n0 + 1.0, -(n0 + 1.0) / (n0 + 2.0)) * std::pow(C0, -2.0 / (n0 + 2.0));
  out.H = (n0 + 1.0) * std::pow(C0, n0);
  out.g = zeros(n0);
  for (int l = 1; l <= n0; ++l) out.g(l - 1, l - 1) = (l + 1.0) / l * base;
  out.A = Tensor3(n0);
  for (int l = 1; l <= n0; ++l) {
    out.A(l - 1, l - 1, l - 1) = -(l * l - 1.0) / (l * l) * base;
    for (int nu = l + 1; nu <= n0; ++nu) {
      const double v = (l + 1.0) / (l * nu) * base;
      out.A(l - 1, l - 1, nu - 1) = v;
      out.A(l - 1, nu - 1, l - 1) = v;
      out.A(nu - 1, l - 1, l - 1) = v;
    }
  }
  // Christoffels: same as n0+1 points in the t-block
  std::vector<FactorSpec> pts(n0 + 1, make_point_factor());
  std::vector<double> w(n0 + 1, 1.0);
  w.back() = C0;
  const auto pred = predict_all(make_spec(std::move(pts), std::move(w)), Vec(n0, 0.0));
  out.Gamma = pred.Gamma;
  return out;
}

double flat_pick_invariant(int n0, double C0) {
  if (n0 < 2) throw UndefinedError("Pick invariant is undefined for n < 2");
  return std::pow(n0 + 1.0, -(n0 + 1.0) / (n0 + 2.0)) * std::pow(C0, -2.0 / (n0 + 2.0));
}

FactorInvariants factor_invariants(const FactorSpec& f, std::span<const double> u) {
  if (f.is_point()) {
    FactorInvariants out;
    out.closed_form = true;
    return out;
  }
  if (static_cast<int>(u.size()) != f.dim())
    throw std::invalid_argument("factor point has the wrong dimension");
  if (const auto* fl = std::get_if<FlatFactor>(&f.kind())) return flat_closed_forms(fl->n0, fl->C0);
  const auto inv = compute_invariants(f.chart(), u);
  FactorInvariants out;
  out.n = f.dim();
  out.L1 = f.L1();
  out.H = inv.frame.H;
  out.g = inv.frame.g;
  out.A = inv.A;
  out.Gamma = inv.Gamma;
  return out;
}

}  // namespace calabi
