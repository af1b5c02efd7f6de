#include "calabi/equiaffine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace calabi {

std::vector<Jet> ImmersionChart::evaluate(std::span<const double> u, int order) const {
  if (static_cast<int>(u.size()) != dim)
    throw std::invalid_argument("chart '" + name + "' expects " + std::to_string(dim) +
                                " coordinates, got " + std::to_string(u.size()));
  const auto seeds = seed_point(u, order);
  auto x = map(seeds);
  if (static_cast<int>(x.size()) != dim + 1)
    throw std::logic_error("chart '" + name + "' returned the wrong ambient dimension");
  for (const auto& xa : x)
    if (!xa.same_space(seeds[0]))
      throw std::logic_error("chart '" + name + "' returned jets in a foreign layout");
  return x;
}

Vec ImmersionChart::position(std::span<const double> u) const {
  const auto x = evaluate(u, 0);
  Vec out;
  for (const auto& xa : x) out.push_back(xa.value());
  return out;
}

ImmersionChart transformed(const ImmersionChart& chart, const Mat& T) {
  ImmersionChart out = chart;
  out.name = chart.name + "|linear";
  out.map = [inner = chart.map, T](std::span<const Jet> u) {
    const auto x = inner(u);
    std::vector<Jet> y;
    for (std::size_t r = 0; r < x.size(); ++r) {
      Jet acc = x[0] * T(r, 0);
      for (std::size_t c = 1; c < x.size(); ++c) acc += x[c] * T(r, c);
      y.push_back(std::move(acc));
    }
    return y;
  };
  return out;
}

ImmersionChart scaled(const ImmersionChart& chart, double mu) {
  const int N = chart.dim + 1;
  Mat T(N, N, 0.0);
  for (int i = 0; i < N; ++i) T(i, i) = mu;
  auto out = transformed(chart, T);
  out.name = chart.name + "|scaled";
  return out;
}

namespace {

using JetMat = Dense<Jet>;

Dense<double> values(const JetMat& m) {
  Dense<double> out(m.rows(), m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).value();
  return out;
}

// Cofactors of the last column of [x_1 .. x_n | *], i.e. nu with
// nu . y = det(x_1, ..., x_n, y).
Vec value_cofactors(const std::vector<std::vector<Jet>>& X1, int n) {
  const int N = n + 1;
  Vec nu(N);
  for (int A = 0; A < N; ++A) {
    Dense<double> minor(n, n, 0.0);
    for (int r = 0, rr = 0; r < N; ++r) {
      if (r == A) continue;
      for (int i = 0; i < n; ++i) minor(rr, i) = X1[i][r].value();
      ++rr;
    }
    const double sign = ((A + n) % 2 == 0) ? 1.0 : -1.0;
    nu[A] = sign * determinant(minor);
  }
  return nu;
}

int definiteness(const Mat& h) {
  Mat l;
  if (cholesky(h, l)) return 1;
  Mat neg = h;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) neg(i, j) = -h(i, j);
  if (cholesky(neg, l)) return -1;
  return 0;
}

struct MetricJets {
  int n = 0;
  std::vector<Jet> x;                          // order 4
  std::vector<std::vector<Jet>> X1;            // [i][A], order 3
  std::vector<std::vector<std::vector<Jet>>> X2;  // [i][j][A], order 2
  JetMat h;                                    // sign-normalized, order 2
  Jet H;                                       // order 2
  Jet H_pow;                                   // H^{-1/(n+2)}, order 2
  JetMat g;                                    // order 2
  JetMat g_inv;                                // order 2
  Jet sqrtG;                                   // order 2
  int sign_flip = 1;
  bool indefinite = false;
};

MetricJets metric_jets(const ImmersionChart& chart, std::span<const double> u, int order,
                       double degeneracy_tol) {
  MetricJets m;
  const int n = chart.dim;
  if (n < 1) throw std::invalid_argument("chart dimension must be positive");
  const int N = n + 1;
  const int top = order - 2;
  m.n = n;
  m.x = chart.evaluate(u, order);
  m.X1.assign(n, std::vector<Jet>(N));
  for (int i = 0; i < n; ++i)
    for (int A = 0; A < N; ++A) m.X1[i][A] = m.x[A].partial(i);
  m.X2.assign(n, std::vector<std::vector<Jet>>(n, std::vector<Jet>(N)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int A = 0; A < N; ++A) {
        m.X2[i][j][A] = m.X1[i][A].partial(j);
        if (j != i) m.X2[j][i][A] = m.X2[i][j][A];
      }

  // Conormal jets nu_A with nu . y = det(x_1..x_n, y); the last column of M is
  // any fixed transversal vector, here the value-level conormal itself.
  const Vec nu0 = value_cofactors(m.X1, n);
  double nu_norm = 0.0;
  for (double v : nu0) nu_norm += v * v;
  const Jet zero = m.X2[0][0][0].zero_like();
  if (!(nu_norm > 0.0)) throw DegenerateError("chart is not immersive (rank-deficient Jacobian)");
  JetMat M(N, N, zero);
  for (int A = 0; A < N; ++A) {
    for (int i = 0; i < n; ++i) M(A, i) = m.X1[i][A].truncate(top);
    M(A, n) = zero + nu0[A];
  }
  std::vector<Jet> nu;
  try {
    LuFactor<Jet> lu(M);
    std::vector<Jet> e(N, zero);
    e[n] += 1.0;
    const auto y = lu.solve_transposed(e);
    const Jet det = lu.determinant();
    for (int A = 0; A < N; ++A) nu.push_back(det * y[A]);
  } catch (const SingularMatrixError&) {
    throw DegenerateError("chart is not immersive (rank-deficient Jacobian)");
  }

  JetMat h(n, n, zero);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = nu[0] * m.X2[i][j][0];
      for (int A = 1; A < N; ++A) acc += nu[A] * m.X2[i][j][A];
      h(i, j) = acc;
      h(j, i) = acc;
    }

  Mat h0 = values(h);
  double scale = max_abs(h0);
  const double det0 = determinant(h0);
  if (!(std::abs(det0) > degeneracy_tol * std::pow(scale, n)) || scale == 0.0)
    throw DegenerateError("degenerate hypersurface: |det h| = " + std::to_string(std::abs(det0)));
  const int def = definiteness(h0);
  m.sign_flip = def < 0 ? -1 : 1;
  m.indefinite = def == 0;
  if (m.sign_flip < 0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = -h(i, j);
  m.h = h;

  LuFactor<Jet> hlu(h, 0.0);
  Jet deth = hlu.determinant();
  m.H = deth.value() > 0 ? deth : -deth;
  m.H_pow = pow(m.H, -1.0 / (n + 2));
  m.g = JetMat(n, n, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.g(i, j) = m.H_pow * h(i, j);
  LuFactor<Jet> glu(m.g, 0.0);
  m.g_inv = glu.inverse();
  Jet detG = glu.determinant();
  if (detG.value() < 0) detG = -detG;
  m.sqrtG = sqrt(detG);
  return m;
}

MetricFrame frame_values(const MetricJets& m) {
  MetricFrame f;
  f.n = m.n;
  f.h = values(m.h);
  f.H = m.H.value();
  f.g = values(m.g);
  f.g_inv = values(m.g_inv);
  f.sqrt_detG = m.sqrtG.value();
  f.sign_flip = m.sign_flip;
  f.indefinite = m.indefinite;
  return f;
}

}  // namespace

MetricFrame blaschke_data(const ImmersionChart& chart, std::span<const double> u) {
  return frame_values(metric_jets(chart, u, 2, AnalysisOptions{}.degeneracy_tol));
}

InvariantSet compute_invariants(const ImmersionChart& chart, std::span<const double> u,
                                const AnalysisOptions& opts) {
  const MetricJets m = metric_jets(chart, u, 4, opts.degeneracy_tol);
  const int n = m.n;
  const int N = n + 1;
  InvariantSet inv;
  inv.n = n;
  inv.frame = frame_values(m);
  for (const auto& xa : m.x) inv.x.push_back(xa.value());

  // Affine normal as (1/n) Laplace-Beltrami of the position, order 1.
  const Jet one_zero = m.sqrtG.truncate(1).zero_like();
  std::vector<Jet> xi(N, one_zero);
  const Jet inv_sqrtG = reciprocal(m.sqrtG.truncate(1));
  for (int A = 0; A < N; ++A) {
    Jet lap = one_zero;
    for (int i = 0; i < n; ++i) {
      Jet w = m.g_inv(i, 0) * m.X1[0][A].truncate(2);
      for (int j = 1; j < n; ++j) w += m.g_inv(i, j) * m.X1[j][A].truncate(2);
      lap += (m.sqrtG * w).partial(i);
    }
    xi[A] = lap * inv_sqrtG / static_cast<double>(n);
  }
  for (const auto& v : xi) inv.xi.push_back(v.value());

  // Levi-Civita symbols of g, order 1.
  std::vector<Dense<Jet>> dg;
  for (int k = 0; k < n; ++k) {
    Dense<Jet> d(n, n, one_zero);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = m.g(i, j).partial(k);
    dg.push_back(std::move(d));
  }
  Dense<Jet> ginv1(n, n, one_zero);
  Dense<Jet> g1(n, n, one_zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ginv1(i, j) = m.g_inv(i, j).truncate(1);
      g1(i, j) = m.g(i, j).truncate(1);
    }
  std::vector<Jet> lc(static_cast<std::size_t>(n) * n * n, one_zero);
  auto lc_at = [&](int k, int i, int j) -> Jet& { return lc[(static_cast<std::size_t>(k) * n + i) * n + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<Jet> lowered;
      for (int l = 0; l < n; ++l) lowered.push_back((dg[j](i, l) + dg[i](j, l) - dg[l](i, j)) * 0.5);
      for (int k = 0; k < n; ++k) {
        Jet acc = ginv1(k, 0) * lowered[0];
        for (int l = 1; l < n; ++l) acc += ginv1(k, l) * lowered[l];
        lc_at(k, i, j) = acc;
        lc_at(k, j, i) = acc;
      }
    }

  // Affine Gauss decomposition x_ij = Gamma^k_ij x_k + kappa_ij xi, order 1.
  Dense<Jet> F(N, N, one_zero);
  for (int A = 0; A < N; ++A) {
    for (int k = 0; k < n; ++k) F(A, k) = m.X1[k][A].truncate(1);
    F(A, n) = xi[A];
  }
  std::vector<Jet> gam(static_cast<std::size_t>(n) * n * n, one_zero);
  auto gam_at = [&](int k, int i, int j) -> Jet& { return gam[(static_cast<std::size_t>(k) * n + i) * n + j]; };
  std::optional<LuFactor<Jet>> flu;
  try {
    flu.emplace(F);
  } catch (const SingularMatrixError&) {
    throw SingularFrameError("frame {x_1..x_n, xi} is numerically singular");
  }
  inv.normal_coefficient = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<Jet> rhs;
      for (int A = 0; A < N; ++A) rhs.push_back(m.X2[i][j][A].truncate(1));
      const auto sol = flu->solve(rhs);
      for (int k = 0; k < n; ++k) {
        gam_at(k, i, j) = sol[k];
        gam_at(k, j, i) = sol[k];
      }
      inv.normal_coefficient =
          std::max(inv.normal_coefficient, std::abs(sol[n].value() - inv.frame.g(i, j)));
    }
  inv.Gamma = Tensor3(n);
  inv.Gamma_LC = Tensor3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        inv.Gamma(k, i, j) = gam_at(k, i, j).value();
        inv.Gamma_LC(k, i, j) = lc_at(k, i, j).value();
      }

  // Cubic form, route 1: lowered difference tensor, symmetrized (order 1).
  std::vector<Jet> diff(static_cast<std::size_t>(n) * n * n, one_zero);
  for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = gam[t] - lc[t];
  auto diff_at = [&](int l, int i, int j) -> const Jet& { return diff[(static_cast<std::size_t>(l) * n + i) * n + j]; };
  std::vector<Jet> low(static_cast<std::size_t>(n) * n * n, one_zero);
  auto low_at = [&](int i, int j, int k) -> Jet& { return low[(static_cast<std::size_t>(i) * n + j) * n + k]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc = g1(k, 0) * diff_at(0, i, j);
        for (int l = 1; l < n; ++l) acc += g1(k, l) * diff_at(l, i, j);
        low_at(i, j, k) = acc;
      }
  std::vector<Jet> cubic(static_cast<std::size_t>(n) * n * n, one_zero);
  auto cubic_at = [&](int i, int j, int k) -> Jet& { return cubic[(static_cast<std::size_t>(i) * n + j) * n + k]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        cubic_at(i, j, k) = (low_at(i, j, k) + low_at(i, k, j) + low_at(j, i, k) + low_at(j, k, i) +
                             low_at(k, i, j) + low_at(k, j, i)) /
                            6.0;
  inv.A = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) inv.A(i, j, k) = cubic_at(i, j, k).value();

  // Route 2: covariant derivative of the determinant form in a unimodular frame.
  {
    const double Hv = m.H.value();
    const double Hp = m.H_pow.value();
    Vec dlogH(n);
    for (int k = 0; k < n; ++k) dlogH[k] = m.H.gradient(k) / Hv;
    const Mat& hv = inv.frame.h;
    double mismatch = 0.0;
    double scale = std::max(max_abs(inv.A), max_abs(inv.frame.g));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double hijk = m.h(i, j).gradient(k) - hv(i, j) * dlogH[k] / (n + 2);
          for (int l = 0; l < n; ++l)
            hijk -= hv(l, j) * inv.Gamma(l, i, k) + hv(i, l) * inv.Gamma(l, j, k);
          const double a2 = -0.5 * Hp * hijk;
          mismatch = std::max(mismatch, std::abs(a2 - inv.A(i, j, k)));
        }
    inv.route_mismatch = mismatch / scale;
    if (inv.route_mismatch > opts.route_tol)
      throw RouteMismatchError("cubic form routes disagree: relative mismatch " +
                               std::to_string(inv.route_mismatch));
  }

  // Shape operator from d_i xi = -B^k_i x_k + rho_i xi.
  {
    Mat F0 = values(F);
    LuFactor<double> lu0(F0);
    ShapeOperator& S = inv.shape;
    S.mixed = zeros(n);
    double rho_max = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec rhs(N);
      for (int A = 0; A < N; ++A) rhs[A] = xi[A].gradient(i);
      const auto sol = lu0.solve(rhs);
      for (int k = 0; k < n; ++k) S.mixed(k, i) = -sol[k];
      rho_max = std::max(rho_max, std::abs(sol[n]));
    }
    inv.normal_component = rho_max;
    if (rho_max > opts.tangential_tol * (1.0 + max_abs(S.mixed)))
      throw NonTangentialError("derivative of the affine normal has a transversal component " +
                               std::to_string(rho_max));
    const Mat& g = inv.frame.g;
    S.B = zeros(n);
    Mat lowered = zeros(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) lowered(i, j) += g(j, k) * S.mixed(k, i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S.B(i, j) = 0.5 * (lowered(i, j) + lowered(j, i));
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += S.mixed(i, i);
    S.L1 = tr / n;
    Mat L;
    if (!inv.frame.indefinite && cholesky(g, L)) {
      // Eigenvalues of B relative to g: L^{-1} B L^{-T}.
      Mat Y = zeros(n);
      for (int c = 0; c < n; ++c) {
        Vec col(n);
        for (int r = 0; r < n; ++r) {
          double s = S.B(r, c);
          for (int k = 0; k < r; ++k) s -= L(r, k) * col[k];
          col[r] = s / L(r, r);
        }
        for (int r = 0; r < n; ++r) Y(r, c) = col[r];
      }
      Mat Z = zeros(n);
      for (int r = 0; r < n; ++r) {
        Vec row(n);
        for (int c = 0; c < n; ++c) {
          double s = Y(r, c);
          for (int k = 0; k < c; ++k) s -= L(c, k) * row[k];
          row[c] = s / L(c, c);
        }
        for (int c = 0; c < n; ++c) Z(r, c) = row[c];
      }
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) Z(r, c) = Z(c, r) = 0.5 * (Z(r, c) + Z(c, r));
      S.eigenvalues = symmetric_eigenvalues(Z);
      S.spread = 0.0;
      for (double e : S.eigenvalues) S.spread = std::max(S.spread, std::abs(e - S.L1));
    } else {
      S.spread = 0.0;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          S.spread = std::max(S.spread, std::abs(S.mixed(k, i) - (k == i ? S.L1 : 0.0)));
    }
  }

  if (n >= 2) inv.J = pick_invariant(inv.frame, inv.A);

  // Levi-Civita covariant derivative of the cubic form.
  inv.nablaA = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = cubic_at(i, j, k).gradient(l);
          for (int mm = 0; mm < n; ++mm)
            v -= inv.Gamma_LC(mm, l, i) * inv.A(mm, j, k) + inv.Gamma_LC(mm, l, j) * inv.A(i, mm, k) +
                 inv.Gamma_LC(mm, l, k) * inv.A(i, j, mm);
          inv.nablaA(i, j, k, l) = v;
        }

  // Riemann tensor of g.
  inv.R = Tensor4(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double v = lc_at(l, j, k).gradient(i) - lc_at(l, i, k).gradient(j);
          for (int mm = 0; mm < n; ++mm)
            v += inv.Gamma_LC(l, i, mm) * inv.Gamma_LC(mm, j, k) -
                 inv.Gamma_LC(l, j, mm) * inv.Gamma_LC(mm, i, k);
          inv.R(l, i, j, k) = v;
        }
  return inv;
}

Vec affine_normal_field(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).xi;
}

Tensor3 induced_connection(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).Gamma;
}

Tensor3 fubini_pick_form(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).A;
}

ShapeOperator shape_operator(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).shape;
}

Tensor4 nabla_A(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).nablaA;
}

Tensor4 curvature_tensor(const ImmersionChart& chart, std::span<const double> u) {
  return compute_invariants(chart, u).R;
}

double pick_invariant(const MetricFrame& frame, const Tensor3& A) {
  const int n = frame.n;
  if (n < 2) throw UndefinedError("Pick invariant is undefined for n < 2");
  const Mat& gi = frame.g_inv;
  // Raise all three indices, then contract with A.
  Tensor3 up(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) s += gi(i, a) * gi(j, b) * gi(k, c) * A(a, b, c);
        up(i, j, k) = s;
      }
  double J = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) J += up(i, j, k) * A(i, j, k);
  return J / (n * (n - 1.0));
}

SphereVerdict classify_sphere(const ImmersionChart& chart, std::span<const Vec> samples,
                              double tol) {
  SphereVerdict v;
  if (samples.size() < 3) {
    v.failure = "at least 3 samples are required";
    return v;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  double spread = 0.0;
  double center = 0.0;
  for (const auto& u : samples) {
    InvariantSet inv;
    try {
      inv = compute_invariants(chart, u);
    } catch (const std::exception& e) {
      v.failure = e.what();
      return v;
    }
    const double L1 = inv.shape.L1;
    lo = std::min(lo, L1);
    hi = std::max(hi, L1);
    sum += L1;
    spread = std::max(spread, inv.shape.spread / std::max(std::abs(L1), 1e-300));
    double num = 0.0;
    double den = 0.0;
    for (std::size_t A = 0; A < inv.x.size(); ++A) {
      num += std::pow(inv.xi[A] + L1 * inv.x[A], 2);
      den += inv.xi[A] * inv.xi[A];
    }
    center = std::max(center, std::sqrt(num / std::max(den, 1e-300)));
  }
  v.L1 = sum / samples.size();
  v.max_spread = spread;
  v.l1_variation = (hi - lo) / std::max(std::abs(v.L1), 1e-300);
  v.center_residual = center;
  v.hyperbolic = v.L1 < 0;
  if (v.L1 == 0.0 || !(spread <= tol))
    v.failure = "affine principal curvatures are not all equal to a nonzero constant";
  else if (!(v.l1_variation <= tol))
    v.failure = "affine mean curvature is not constant";
  else if (!(center <= tol))
    v.failure = "affine normals do not meet at the origin";
  v.is_proper = v.failure.empty();
  return v;
}

namespace {

// A^l_ik = g^{lm} A_ikm
Tensor3 raise_last(const InvariantSet& inv) {
  const int n = inv.n;
  Tensor3 up(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += inv.frame.g_inv(l, m) * inv.A(i, k, m);
        up(l, i, k) = s;
      }
  return up;
}

// [A(d_i), A(d_j)] d_k, l-component.
double commutator(const Tensor3& up, int l, int i, int j, int k) {
  double s = 0.0;
  for (int m = 0; m < up.dim(); ++m) s += up(m, j, k) * up(l, i, m) - up(m, i, k) * up(l, j, m);
  return s;
}

Residual finish(double abs, double scale) { return {abs, abs / std::max(scale, 1e-300)}; }

}  // namespace

Residual apolarity_residual(const InvariantSet& inv) {
  const int n = inv.n;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += inv.frame.g_inv(i, j) * inv.A(i, j, k);
    worst = std::max(worst, std::abs(s));
  }
  return finish(worst, std::max(max_abs(inv.A), max_abs(inv.frame.g)));
}

Residual trace_identity_residual(const InvariantSet& inv) {
  const int n = inv.n;
  double worst = 0.0;
  double scale = std::max(max_abs(inv.frame.g) * std::abs(inv.shape.L1), max_abs(inv.shape.B));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double lhs = 0.0;
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) lhs += inv.frame.g_inv(l, m) * inv.nablaA(i, j, m, l);
      const double rhs = 0.5 * n * (inv.shape.L1 * inv.frame.g(i, j) - inv.shape.B(i, j));
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
  return finish(worst, std::max(scale, max_abs(inv.frame.g)));
}

Residual codazzi_residual(const InvariantSet& inv) {
  const int n = inv.n;
  const Mat& g = inv.frame.g;
  const Mat& B = inv.shape.B;
  double worst = 0.0;
  double scale = std::max({max_abs(inv.nablaA), max_abs(g) * max_abs(B), max_abs(g)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double lhs = inv.nablaA(i, j, k, l) - inv.nablaA(i, j, l, k);
          const double rhs =
              0.5 * (g(i, k) * B(j, l) - g(j, l) * B(i, k) - g(i, l) * B(j, k) + g(j, k) * B(i, l));
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return finish(worst, scale);
}

Residual sphere_gauss_residual(const InvariantSet& inv) {
  const int n = inv.n;
  const Mat& g = inv.frame.g;
  const double L1 = inv.shape.L1;
  const Tensor3 up = raise_last(inv);
  double worst = 0.0;
  double scale = std::max(max_abs(inv.R), std::abs(L1) * max_abs(g));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double comm = commutator(up, l, i, j, k);
          const double rhs = L1 * (g(j, k) * (l == i) - g(i, k) * (l == j)) - comm;
          worst = std::max(worst, std::abs(inv.R(l, i, j, k) - rhs));
          scale = std::max(scale, std::abs(comm));
        }
  return finish(worst, std::max(scale, max_abs(g)));
}

Residual gauss_residual(const InvariantSet& inv) {
  const int n = inv.n;
  const Mat& g = inv.frame.g;
  const Mat& B = inv.shape.B;
  const Mat& Bm = inv.shape.mixed;
  const Tensor3 up = raise_last(inv);
  double worst = 0.0;
  double scale = std::max({max_abs(inv.R), max_abs(B), max_abs(g) * max_abs(Bm)});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double comm = commutator(up, l, i, j, k);
          const double rhs = 0.5 * (g(j, k) * Bm(l, i) + B(j, k) * (l == i) - g(i, k) * Bm(l, j) -
                                    B(i, k) * (l == j)) -
                             comm;
          worst = std::max(worst, std::abs(inv.R(l, i, j, k) - rhs));
          scale = std::max(scale, std::abs(comm));
        }
  return finish(worst, std::max(scale, max_abs(g)));
}

}  // namespace calabi
