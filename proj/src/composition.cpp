#include "calabi/composition.hpp"

#include <cmath>
#include <stdexcept>

namespace calabi {

int CompositionSpec::n() const {
  int n = K() - 1;
  for (const auto& f : factors) n += f.dim();
  return n;
}

int CompositionSpec::points() const {
  int r = 0;
  for (const auto& f : factors) r += f.is_point() ? 1 : 0;
  return r;
}

int CompositionSpec::spheres() const { return K() - points(); }

void CompositionSpec::validate() const {
  if (K() < 2) throw std::invalid_argument("a composition needs at least 2 factors");
  if (weights.size() != factors.size())
    throw std::invalid_argument("one weight per factor is required");
  for (double c : weights)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("weights must be positive");
}

double CompositionSpec::effective_weight(int a) const {
  const auto& f = factors.at(a - 1);
  double w = weights.at(a - 1);
  if (const auto* p = std::get_if<PointFactor>(&f.kind())) w *= p->value;
  return w;
}

CompositionSpec make_spec(std::vector<FactorSpec> factors, std::vector<double> weights, std::string id) {
  CompositionSpec s{std::move(factors), std::move(weights), std::move(id)};
  if (s.weights.empty()) s.weights.assign(s.factors.size(), 1.0);
  s.validate();
  return s;
}

int IndexLayout::owner(int i) const {
  if (i < K - 1) return 0;
  for (int a = K; a >= 1; --a)
    if (i >= offsets[a - 1] && dims[a - 1] > 0) return a;
  throw std::out_of_range("coordinate index out of range");
}

IndexLayout layout(const CompositionSpec& spec) {
  spec.validate();
  IndexLayout lay;
  lay.K = spec.K();
  lay.n = spec.n();
  lay.f.assign(lay.K + 1, 0);
  int off = lay.K - 1;
  int amb = 0;
  for (int a = 1; a <= lay.K; ++a) {
    const int na = spec.factors[a - 1].dim();
    lay.dims.push_back(na);
    lay.f[a] = lay.f[a - 1] + na + 1;
    lay.offsets.push_back(off);
    lay.ambient.push_back(amb);
    off += na;
    amb += na + 1;
  }
  if (lay.f[lay.K] != lay.n + 1) throw std::logic_error("layout bookkeeping: f_K != n + 1");
  return lay;
}

std::vector<Jet> weight_functions(const CompositionSpec& spec, std::span<const Jet> t) {
  const auto lay = layout(spec);
  if (static_cast<int>(t.size()) != lay.K - 1)
    throw std::invalid_argument("weight functions need K-1 parameters");
  std::vector<Jet> e;
  for (int a = 1; a <= lay.K; ++a) {
    Jet expo = t[0].zero_like();
    if (a >= 2) expo -= t[a - 2] / (lay.dims[a - 1] + 1.0);
    for (int lam = a; lam <= lay.K - 1; ++lam) expo += t[lam - 1] / static_cast<double>(lay.f[lam]);
    e.push_back(exp(expo));
  }
  return e;
}

std::vector<Jet> weight_functions(const CompositionSpec& spec, std::span<const double> t, int order) {
  const auto seeds = seed_point(t, order);
  return weight_functions(spec, seeds);
}

ImmersionChart compose(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  ImmersionChart chart;
  chart.dim = lay.n;
  chart.name = spec.id.empty() ? "composition" : spec.id;
  chart.domain = sample_domain(spec);
  chart.map = [spec, lay](std::span<const Jet> u) {
    const auto e = weight_functions(spec, u.subspan(0, lay.K - 1));
    std::vector<Jet> x;
    for (int a = 1; a <= lay.K; ++a) {
      const auto block = spec.factors[a - 1].embed(u.subspan(lay.offsets[a - 1], lay.dims[a - 1]), u[0]);
      const Jet scale = e[a - 1] * spec.weights[a - 1];
      for (const auto& xa : block) x.push_back(scale * xa);
    }
    return x;
  };
  return chart;
}

double structure_constant(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  double logC = -std::log(static_cast<double>(lay.f[lay.K]));
  for (int a = 1; a <= lay.K; ++a) {
    const double na = lay.dims[a - 1];
    const double L1a = spec.factors[a - 1].L1();
    if (!(L1a < 0.0)) throw std::invalid_argument("factor affine mean curvature must be negative");
    logC += 2.0 * (na + 1) * std::log(spec.effective_weight(a)) - (na + 1) * std::log(na + 1) -
            (na + 2) * std::log(-L1a);
  }
  return std::exp(logC / (lay.n + 2));
}

double predicted_L1(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  return -1.0 / (lay.f[lay.K] * structure_constant(spec));
}

std::vector<Vec> split_point(const IndexLayout& lay, std::span<const double> u) {
  if (static_cast<int>(u.size()) != lay.n) throw std::invalid_argument("point has the wrong dimension");
  std::vector<Vec> parts;
  for (int a = 1; a <= lay.K; ++a)
    parts.emplace_back(u.begin() + lay.offsets[a - 1], u.begin() + lay.offsets[a - 1] + lay.dims[a - 1]);
  return parts;
}

Box sample_domain(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  Box box{Vec(lay.n, -0.5), Vec(lay.n, 0.5)};
  for (int a = 1; a <= lay.K; ++a) {
    if (lay.dims[a - 1] == 0) continue;
    const Box fb = spec.factors[a - 1].domain();
    for (int i = 0; i < lay.dims[a - 1]; ++i) {
      box.lo[lay.offsets[a - 1] + i] = fb.lo[i];
      box.hi[lay.offsets[a - 1] + i] = fb.hi[i];
    }
  }
  return box;
}

std::pair<double, double> normalization_constants(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  double log_cp = 0.0;
  for (int a = 1; a <= lay.K; ++a) log_cp += (lay.dims[a - 1] + 1.0) * std::log(spec.weights[a - 1]);
  return {std::exp(log_cp / lay.f[lay.K]), std::exp(log_cp)};
}

namespace {

void set_sym(Tensor3& A, std::vector<CubicFamily>& fam, int i, int j, int k, double v, CubicFamily tag) {
  const int n = A.dim();
  const int idx[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
  for (const auto& p : idx) {
    A(p[0], p[1], p[2]) = v;
    fam[(static_cast<std::size_t>(p[0]) * n + p[1]) * n + p[2]] = tag;
  }
}

}  // namespace

Prediction predict_all(const CompositionSpec& spec, std::span<const double> u) {
  const auto lay = layout(spec);
  const int n = lay.n;
  const int K = lay.K;
  const auto& f = lay.f;
  auto nn = [&](int a) { return lay.dims[a - 1]; };
  auto tix = [&](int lam) { return lam - 1; };

  Prediction p;
  p.C = structure_constant(spec);
  p.L1 = -1.0 / (f[K] * p.C);
  std::tie(p.c, p.c_prime) = normalization_constants(spec);

  const auto parts = split_point(lay, u);
  std::vector<FactorInvariants> fi;
  for (int a = 1; a <= K; ++a) fi.push_back(factor_invariants(spec.factors[a - 1], parts[a - 1]));

  const double C = p.C;
  p.g = zeros(n);
  for (int lam = 1; lam <= K - 1; ++lam)
    p.g(tix(lam), tix(lam)) = f[lam + 1] * C / ((nn(lam + 1) + 1.0) * f[lam]);
  std::vector<double> kappa(K + 1, 0.0);  // (n_a+1)(-L1^a)C
  for (int a = 1; a <= K; ++a) {
    kappa[a] = (nn(a) + 1.0) * (-fi[a - 1].L1) * C;
    const int o = lay.offsets[a - 1];
    for (int i = 0; i < nn(a); ++i)
      for (int j = 0; j < nn(a); ++j) p.g(o + i, o + j) = kappa[a] * fi[a - 1].g(i, j);
  }

  // cubic form
  p.A = Tensor3(n);
  p.A_family.assign(static_cast<std::size_t>(n) * n * n, CubicFamily::None);
  for (int lam = 1; lam <= K - 1; ++lam) {
    const double glam = p.g(tix(lam), tix(lam));
    const int l = tix(lam);
    set_sym(p.A, p.A_family, l, l, l, glam * (1.0 / f[lam] - 1.0 / (nn(lam + 1) + 1.0)), CubicFamily::TTT);
    for (int mu = lam + 1; mu <= K - 1; ++mu)
      set_sym(p.A, p.A_family, l, l, tix(mu), glam / f[mu], CubicFamily::TTS);
  }
  for (int a = 1; a <= K; ++a) {
    const int o = lay.offsets[a - 1];
    const auto& F = fi[a - 1];
    for (int i = 0; i < nn(a); ++i)
      for (int j = i; j < nn(a); ++j) {
        if (a >= 2)
          set_sym(p.A, p.A_family, o + i, o + j, tix(a - 1), -kappa[a] / (nn(a) + 1.0) * F.g(i, j), CubicFamily::BlockPrev);
        for (int lam = a; lam <= K - 1; ++lam)
          set_sym(p.A, p.A_family, o + i, o + j, tix(lam), kappa[a] * F.g(i, j) / f[lam], CubicFamily::BlockNext);
        for (int k = j; k < nn(a); ++k)
          set_sym(p.A, p.A_family, o + i, o + j, o + k, kappa[a] * F.A(i, j, k), CubicFamily::BlockOwn);
      }
  }

  // induced connection, Gamma(k, i, j) = Gamma^k_ij
  p.Gamma = Tensor3(n);
  auto setG = [&](int k, int i, int j, double v) {
    p.Gamma(k, i, j) = v;
    p.Gamma(k, j, i) = v;
  };
  for (int lam = 1; lam <= K - 1; ++lam) {
    setG(tix(lam), tix(lam), tix(lam), 1.0 / f[lam] - 1.0 / (nn(lam + 1) + 1.0));
    for (int mu = lam + 1; mu <= K - 1; ++mu) {
      setG(tix(lam), tix(lam), tix(mu), 1.0 / f[mu]);
      setG(tix(mu), tix(lam), tix(lam),
           (nn(mu + 1) + 1.0) * f[lam + 1] / ((nn(lam + 1) + 1.0) * f[mu + 1] * f[lam]));
    }
  }
  for (int a = 1; a <= K; ++a) {
    const int o = lay.offsets[a - 1];
    const auto& F = fi[a - 1];
    for (int i = 0; i < nn(a); ++i) {
      for (int j = 0; j < nn(a); ++j) {
        for (int k = 0; k < nn(a); ++k) p.Gamma(o + k, o + i, o + j) = F.Gamma(k, i, j);
        if (a >= 2)
          p.Gamma(tix(a - 1), o + i, o + j) = (nn(a) + 1.0) * f[a - 1] / f[a] * F.L1 * F.g(i, j);
        for (int lam = a; lam <= K - 1; ++lam)
          p.Gamma(tix(lam), o + i, o + j) =
              -(nn(a) + 1.0) * (nn(lam + 1) + 1.0) / f[lam + 1] * F.L1 * F.g(i, j);
      }
      if (a >= 2) setG(o + i, tix(a - 1), o + i, -1.0 / (nn(a) + 1.0));
      for (int lam = a; lam <= K - 1; ++lam) setG(o + i, tix(lam), o + i, 1.0 / f[lam]);
    }
  }

  // |det h|, t-independent
  double logH = std::log(static_cast<double>(f[K]));
  for (int a = 1; a <= K; ++a) {
    const double na = nn(a);
    logH += (na + 1) * (f[K] - 1) * std::log(spec.effective_weight(a)) +
            (f[K] + 1.0) / (na + 2) * std::log(fi[a - 1].H) - (f[K] - na) * std::log(na + 1) -
            (f[K] - na - 1) * std::log(-fi[a - 1].L1);
  }
  p.H = std::exp(logH);
  return p;
}

MeanCurvatureVectors mean_curvature_vectors(const CompositionSpec& spec, std::span<const double> u,
                                            const InvariantSet& inv) {
  const auto lay = layout(spec);
  const int n = lay.n;
  const int K = lay.K;
  const auto& f = lay.f;
  if (spec.spheres() == 0) throw std::invalid_argument("mean curvature vectors need a positive-dimensional factor");
  (void)u;
  const double C = structure_constant(spec);
  const double L1 = -1.0 / (f[K] * C);
  MeanCurvatureVectors out;
  for (int a = 1; a <= K; ++a) {
    const int na = lay.dims[a - 1];
    if (na == 0) continue;
    out.factors.push_back(a);
    Vec closed(n, 0.0);
    if (a >= 2) closed[a - 2] = -static_cast<double>(f[a - 1]) / (f[a] * C);
    for (int lam = a; lam <= K - 1; ++lam) closed[lam - 1] = (lay.dims[lam] + 1.0) / (f[lam + 1] * C);
    out.closed_form.push_back(closed);

    // (1/n_a) tr_{g_a} of the t-component of A restricted to the block
    const int o = lay.offsets[a - 1];
    Mat ga(na, na, 0.0);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j) ga(i, j) = inv.frame.g(o + i, o + j);
    const Mat ga_inv = LuFactor<double>(ga).inverse();
    Vec trace(n, 0.0);
    for (int lam = 0; lam < K - 1; ++lam) {
      double s = 0.0;
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
          double up = 0.0;
          for (int m = 0; m < n; ++m) up += inv.frame.g_inv(lam, m) * inv.A(o + i, o + j, m);
          s += ga_inv(i, j) * up;
        }
      trace[lam] = s / na;
    }
    out.from_trace.push_back(trace);
    for (int i = 0; i < n; ++i) out.route_gap = std::max(out.route_gap, std::abs(trace[i] - closed[i]));
  }
  const int s = static_cast<int>(out.factors.size());
  out.pairings_closed = Mat(s, s, L1);
  out.pairings = Mat(s, s, 0.0);
  for (int x = 0; x < s; ++x) {
    const int na = lay.dims[out.factors[x] - 1];
    out.pairings_closed(x, x) = (n - na) / (na + 1.0) * (-L1);
    for (int y = 0; y < s; ++y) {
      double v = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += out.from_trace[x][i] * inv.frame.g(i, j) * out.from_trace[y][j];
      out.pairings(x, y) = v;
    }
  }
  return out;
}

MeanCurvatureVectors mean_curvature_vectors(const CompositionSpec& spec, std::span<const double> u) {
  return mean_curvature_vectors(spec, u, compute_invariants(compose(spec), u));
}

}  // namespace calabi
