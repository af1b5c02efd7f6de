#include "calabi/verify.hpp"

#include <algorithm>
#include <atomic>
#include <boost/rational.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "calabi/spec_io.hpp"

namespace calabi {

using nlohmann::ordered_json;

// ---------------------------------------------------------------- reports

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok(); });
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ordered_json VerificationReport::to_json() const {
  ordered_json out;
  out["spec_id"] = spec_id;
  out["suite"] = suite;
  out["passed"] = passed();
  out["samples"] = {{"count", samples}, {"seed", seed}};
  out["tolerance"] = tolerance;
  out["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json j;
    j["name"] = c.name;
    j["status"] = c.status;
    j["pass"] = c.ok();
    j["max_abs_residual"] = c.max_abs_residual;
    j["max_rel_residual"] = c.max_rel_residual;
    j["tolerance"] = c.tolerance;
    if (!c.detail.empty()) j["detail"] = c.detail;
    out["checks"].push_back(std::move(j));
  }
  out["summary"] = summary;
  return out;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "spec_id,suite,check,status,max_abs_residual,max_rel_residual,tolerance,detail\n";
  for (const auto& c : checks)
    os << csv_field(spec_id) << ',' << suite << ',' << c.name << ',' << c.status << ','
       << g17(c.max_abs_residual) << ',' << g17(c.max_rel_residual) << ',' << g17(c.tolerance) << ','
       << csv_field(c.detail) << '\n';
  return os.str();
}

Check& CheckBook::slot(const std::string& name, double tol) {
  for (auto& c : checks_)
    if (c.name == name) return c;
  Check c;
  c.name = name;
  c.tolerance = tol;
  checks_.push_back(c);
  return checks_.back();
}

void CheckBook::record(const std::string& name, double abs, double rel, double tol) {
  Check& c = slot(name, tol);
  c.tolerance = tol;
  if (c.status == "error") return;
  // NaN never passes
  if (!(abs == abs) || !(rel == rel)) {
    c.status = "fail";
    c.max_abs_residual = c.max_rel_residual = std::numeric_limits<double>::infinity();
    c.detail = "non-finite residual";
    return;
  }
  c.max_abs_residual = std::max(c.max_abs_residual, abs);
  c.max_rel_residual = std::max(c.max_rel_residual, rel);
  if (c.status == "skipped") c.status = "pass";
  if (c.max_rel_residual > tol) c.status = "fail";
}

void CheckBook::fail(const std::string& name, const std::string& detail, double tol) {
  Check& c = slot(name, tol);
  c.status = "error";
  if (c.detail.empty()) c.detail = detail;
  c.max_abs_residual = c.max_rel_residual = std::numeric_limits<double>::infinity();
}

void CheckBook::skip(const std::string& name, const std::string& reason) {
  Check& c = slot(name, 0.0);
  c.status = "skipped";
  c.detail = reason;
}

void CheckBook::merge(const CheckBook& other) {
  for (const auto& o : other.checks_) {
    if (o.status == "error") {
      fail(o.name, o.detail, o.tolerance);
    } else if (o.status == "skipped") {
      bool seen = false;
      for (const auto& c : checks_) seen = seen || c.name == o.name;
      if (!seen) skip(o.name, o.detail);
    } else {
      record(o.name, o.max_abs_residual, o.max_rel_residual, o.tolerance);
      if (o.status == "fail" && !o.detail.empty()) {
        Check& c = slot(o.name, o.tolerance);
        if (c.detail.empty()) c.detail = o.detail;
      }
    }
  }
}

std::vector<Check> CheckBook::finish() const {
  auto out = checks_;
  std::sort(out.begin(), out.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("CALABI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

// Results land in index order, so the reduction is independent of scheduling.
template <class R, class F>
std::vector<R> parallel_map(int count, F fn) {
  std::vector<R> out(count);
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) out[i] = fn(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double zero_tol(double tol) { return tol * 1e-2; }
double apolar_tol(double tol) { return tol * 1e-1; }

void record_identities(CheckBook& b, const InvariantSet& inv, double tol, bool sphere) {
  const auto ap = apolarity_residual(inv);
  b.record("identity.apolarity", ap.abs, ap.rel, apolar_tol(tol));
  const auto tr = trace_identity_residual(inv);
  b.record("identity.trace", tr.abs, tr.rel, tol);
  const auto co = codazzi_residual(inv);
  b.record("identity.codazzi", co.abs, co.rel, tol);
  const auto ga = gauss_residual(inv);
  b.record("identity.gauss", ga.abs, ga.rel, tol);
  if (sphere) {
    const auto gs = sphere_gauss_residual(inv);
    b.record("identity.gauss_sphere", gs.abs, gs.rel, tol);
  }
  b.record("engine.route_agreement", inv.route_mismatch * std::max(max_abs(inv.A), max_abs(inv.frame.g)),
           inv.route_mismatch, apolar_tol(tol));
}

double sphere_center_residual(const InvariantSet& inv) {
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < inv.x.size(); ++a) {
    num += std::pow(inv.xi[a] + inv.shape.L1 * inv.x[a], 2);
    den += inv.xi[a] * inv.xi[a];
  }
  return std::sqrt(num / den);
}

ordered_json layout_json(const IndexLayout& lay) {
  ordered_json j;
  j["n"] = lay.n;
  j["K"] = lay.K;
  j["f"] = std::vector<int>(lay.f.begin() + 1, lay.f.end());
  return j;
}

struct SpecSample {
  CheckBook book;
  double L1 = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

// ---------------------------------------------------------------- verify_spec

VerificationReport verify_spec(const CompositionSpec& spec, int n_samples, double tol, std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.spec_id = spec_label(spec);
  rep.suite = "verify";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;

  const auto lay = layout(spec);
  const auto chart = compose(spec);
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(chart.domain, n_samples, rng);
  const bool has_spheres = spec.spheres() > 0;
  const double C = structure_constant(spec);
  const double L1p = -1.0 / (lay.f[lay.K] * C);

  auto results = parallel_map<SpecSample>(n_samples, [&](int s) {
    SpecSample out;
    CheckBook& b = out.book;
    const Vec& u = samples[s];
    try {
      const auto inv = compute_invariants(chart, u);
      const auto p = predict_all(spec, u);
      out.L1 = inv.shape.L1;
      const int n = lay.n;
      const double gs = max_abs(p.g);

      // metric: predicted nonzero entries vs the structurally zero ones
      double g_abs = 0.0, g_zero = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double d = std::abs(inv.frame.g(i, j) - p.g(i, j));
          const int oi = lay.owner(i), oj = lay.owner(j);
          const bool structural_zero = (oi != oj) || (oi == 0 && i != j);
          if (structural_zero)
            g_zero = std::max(g_zero, d);
          else
            g_abs = std::max(g_abs, d);
        }
      b.record("metric.match", g_abs, g_abs / gs, tol);
      b.record("metric.block_orthogonality", g_zero, g_zero / gs, zero_tol(tol));

      const double as = std::max(max_abs(p.A), gs);
      double a_abs = 0.0, a_zero = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double d = std::abs(inv.A(i, j, k) - p.A(i, j, k));
            if (p.family(i, j, k) == CubicFamily::None)
              a_zero = std::max(a_zero, d);
            else
              a_abs = std::max(a_abs, d);
          }
      b.record("fubini_pick.match", a_abs, a_abs / as, tol);
      // relative to |A|; curves (n = 1) have A = 0, fall back to |g| there
      const double zs = max_abs(p.A) > 0.0 ? max_abs(p.A) : gs;
      b.record("fubini_pick.admissible_families", a_zero, a_zero / zs, zero_tol(tol));

      const double gam = max_diff(inv.Gamma.data(), p.Gamma.data());
      b.record("christoffel.match", gam, gam / std::max(1.0, max_abs(p.Gamma)), tol);

      const double dH = std::abs(inv.frame.H - p.H);
      b.record("determinant_form.match", dH, dH / p.H, tol);

      const double dL = std::abs(inv.shape.L1 - L1p);
      b.record("mean_curvature.match", dL, dL / std::abs(L1p), tol);
      b.record("sphere.principal_spread", inv.shape.spread, inv.shape.spread / std::abs(inv.shape.L1), tol);
      const double cr = sphere_center_residual(inv);
      b.record("sphere.center", cr, cr, tol);

      record_identities(b, inv, tol, true);

      if (has_spheres) {
        const auto mc = mean_curvature_vectors(spec, u, inv);
        double scale = 0.0;
        for (const auto& v : mc.closed_form) scale = std::max(scale, max_abs(v));
        b.record("mean_curvature_vectors.routes", mc.route_gap, mc.route_gap / scale, tol);
        const double dp = max_diff(mc.pairings, mc.pairings_closed);
        b.record("mean_curvature_vectors.pairings", dp, dp / max_abs(mc.pairings_closed), tol);
      } else {
        b.skip("mean_curvature_vectors.routes", "no positive-dimensional factor");
        b.skip("mean_curvature_vectors.pairings", "no positive-dimensional factor");
      }
    } catch (const std::exception& e) {
      b.fail("engine.evaluation", e.what());
    }
    return out;
  });

  CheckBook book;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  int good = 0;
  for (const auto& r : results) {
    book.merge(r.book);
    if (r.L1 == r.L1) {
      lo = std::min(lo, r.L1);
      hi = std::max(hi, r.L1);
      sum += r.L1;
      ++good;
    }
  }
  if (good > 0) book.record("sphere.constant_mean_curvature", hi - lo, (hi - lo) / std::abs(L1p), tol);
  rep.checks = book.finish();

  const auto [c, cp] = normalization_constants(spec);
  rep.summary["layout"] = layout_json(lay);
  rep.summary["C"] = C;
  rep.summary["L1_predicted"] = L1p;
  if (good > 0) rep.summary["L1_engine_mean"] = sum / good;
  rep.summary["normalization"] = {{"c", c}, {"c_prime", cp}};
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- laws

Mat block_swap(int m1, int m2) {
  const int N = m1 + m2;
  Mat P(N, N, 0.0);
  for (int i = 0; i < m1; ++i) P(m2 + i, i) = 1.0;
  for (int i = 0; i < m2; ++i) P(i, m1 + i) = 1.0;
  return P;
}

VerificationReport verify_commutativity(const FactorSpec& f1, const FactorSpec& f2, double tol, int n_samples,
                                        std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  const auto s12 = make_spec({f1, f2});
  const auto s21 = make_spec({f2, f1});
  rep.spec_id = "commute[" + f1.describe() + "," + f2.describe() + "]";
  rep.suite = "commutativity";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;

  const int n1 = f1.dim(), n2 = f2.dim();
  const Mat P = block_swap(n1 + 1, n2 + 1);
  const double det = determinant(P);
  const double expected = ((n1 + 1) * (n2 + 1)) % 2 == 0 ? 1.0 : -1.0;
  CheckBook book;
  book.record("commutativity.determinant", std::abs(det - expected), std::abs(det - expected), 0.0);

  const auto x12 = compose(s12);
  const auto x21 = compose(s21);
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(x12.domain, n_samples, rng);
  auto results = parallel_map<CheckBook>(n_samples, [&](int s) {
    CheckBook b;
    const Vec& u = samples[s];
    // (t, p1, p2) -> (-t, p2, p1)
    Vec v;
    v.push_back(-u[0]);
    v.insert(v.end(), u.begin() + 1 + n1, u.end());
    v.insert(v.end(), u.begin() + 1, u.begin() + 1 + n1);
    try {
      const Vec y = x12.position(u);
      const Vec y2 = x21.position(v);
      Vec Py(y.size(), 0.0);
      for (std::size_t r = 0; r < y.size(); ++r)
        for (std::size_t c = 0; c < y.size(); ++c) Py[r] += P(r, c) * y[c];
      const double d = max_diff(Py, y2);
      b.record("commutativity.pointwise", d, d / max_abs(y2), tol);
    } catch (const std::exception& e) {
      b.fail("engine.evaluation", e.what());
    }
    return b;
  });
  for (const auto& r : results) book.merge(r);
  const double dL = std::abs(predicted_L1(s12) - predicted_L1(s21));
  book.record("commutativity.mean_curvature", dL, dL / std::abs(predicted_L1(s12)), tol);
  rep.checks = book.finish();
  rep.summary["swap_determinant"] = det;
  rep.summary["expected_determinant"] = expected;
  rep.summary["coordinate_change"] = "t -> -t, (p1, p2) -> (p2, p1)";
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

int associativity_exponent_mismatches(int n1, int n2, int n3) {
  using Q = boost::rational<long long>;
  const long long a = n1 + 1, b = n2 + 1, c = n3 + 1;
  // s2 = t1 + a/(a+b) t2, s1 = -c/(b+c) t1 + b(a+b+c)/((a+b)(b+c)) t2
  const Q s2_t1(1), s2_t2(a, a + b);
  const Q s1_t1(-c, b + c), s1_t2(b * (a + b + c), (a + b) * (b + c));
  // left exponents, as coefficients of (t1, t2)
  const Q L[3][2] = {{Q(1, a), Q(1, a + b)}, {Q(-1, b), Q(1, a + b)}, {Q(0), Q(-1, c)}};
  // right exponents in (s1, s2), then substituted
  const Q Rs[3][2] = {{Q(0), Q(1, a)}, {Q(1, b), Q(-1, b + c)}, {Q(-1, c), Q(-1, b + c)}};
  int bad = 0;
  for (int k = 0; k < 3; ++k) {
    const Q r_t1 = Rs[k][0] * s1_t1 + Rs[k][1] * s2_t1;
    const Q r_t2 = Rs[k][0] * s1_t2 + Rs[k][1] * s2_t2;
    bad += (r_t1 != L[k][0]) + (r_t2 != L[k][1]);
  }
  return bad;
}

VerificationReport verify_associativity(const FactorSpec& f1, const FactorSpec& f2, const FactorSpec& f3,
                                        double tol, int n_samples, std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.spec_id = "associate[" + f1.describe() + "," + f2.describe() + "," + f3.describe() + "]";
  rep.suite = "associativity";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;
  const int n1 = f1.dim(), n2 = f2.dim(), n3 = f3.dim();

  const auto left = compose(make_spec({make_composite_factor(make_spec({f1, f2})), f3}));
  const auto right = compose(make_spec({f1, make_composite_factor(make_spec({f2, f3}))}));
  CheckBook book;
  const int bad = associativity_exponent_mismatches(n1, n2, n3);
  book.record("associativity.exponent_identities", bad, bad, 0.0);

  const double a = n1 + 1, b = n2 + 1, c = n3 + 1;
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(left.domain, n_samples, rng);
  auto results = parallel_map<CheckBook>(n_samples, [&](int s) {
    CheckBook bk;
    const Vec& u = samples[s];
    // left: (t2, t1, p1, p2, p3); right: (s2, p1, s1, p2, p3)
    const double t2 = u[0], t1 = u[1];
    const double s2 = t1 + a / (a + b) * t2;
    const double s1 = -c / (b + c) * t1 + b * (a + b + c) / ((a + b) * (b + c)) * t2;
    Vec v{s2};
    v.insert(v.end(), u.begin() + 2, u.begin() + 2 + n1);
    v.push_back(s1);
    v.insert(v.end(), u.begin() + 2 + n1, u.end());
    try {
      const Vec y = left.position(u);
      const Vec z = right.position(v);
      const double d = max_diff(y, z);
      bk.record("associativity.pointwise", d, d / max_abs(z), tol);
    } catch (const std::exception& e) {
      bk.fail("engine.evaluation", e.what());
    }
    return bk;
  });
  for (const auto& r : results) book.merge(r);
  rep.checks = book.finish();
  rep.summary["coordinate_change"] = {
      {"s2", {{"t1", 1.0}, {"t2", a / (a + b)}}},
      {"s1", {{"t1", -c / (b + c)}, {"t2", b * (a + b + c) / ((a + b) * (b + c))}}}};
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- equivalence

VerificationReport verify_equivalence_triple(const CompositionSpec& spec, double tol, int n_samples,
                                             std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.spec_id = spec_label(spec);
  rep.suite = "equivalence";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;

  const auto lay = layout(spec);
  const int K = lay.K;
  const auto [c, cp] = normalization_constants(spec);
  const double nK = lay.dims[K - 1];
  const double c_tilde = std::pow(cp, 1.0 / (nK + 1.0));

  CompositionSpec bar = spec;
  bar.weights.assign(K, c);
  CompositionSpec tilde = spec;
  tilde.weights.assign(K, 1.0);
  tilde.weights[K - 1] = c_tilde;
  CompositionSpec literal = tilde;
  literal.weights[K - 1] = cp;

  // x = D x_bar, x_tilde = Dt x
  const int N = lay.n + 1;
  Mat D(N, N, 0.0), Dt(N, N, 0.0);
  for (int a = 1; a <= K; ++a)
    for (int i = 0; i <= lay.dims[a - 1]; ++i) {
      const int r = lay.ambient[a - 1] + i;
      D(r, r) = spec.weights[a - 1] / c;
      Dt(r, r) = (a < K ? 1.0 : c_tilde) / spec.weights[a - 1];
    }
  CheckBook book;
  const double dD = std::abs(determinant(D) - 1.0);
  const double dDt = std::abs(determinant(Dt) - 1.0);
  book.record("equivalence.witness_determinant", std::max(dD, dDt), std::max(dD, dDt), zero_tol(tol));

  // translation witness: c_a e_a(t) = c e_a(t + delta)
  Mat M(K, K - 1, 0.0);
  Vec rhs(K);
  for (int a = 1; a <= K; ++a) {
    if (a >= 2) M(a - 1, a - 2) = -1.0 / (lay.dims[a - 1] + 1.0);
    for (int lam = a; lam <= K - 1; ++lam) M(a - 1, lam - 1) = 1.0 / lay.f[lam];
    rhs[a - 1] = std::log(spec.weights[a - 1] / c);
  }
  Mat MtM(K - 1, K - 1, 0.0);
  Vec Mtb(K - 1, 0.0);
  for (int i = 0; i < K - 1; ++i) {
    for (int a = 0; a < K; ++a) Mtb[i] += M(a, i) * rhs[a];
    for (int j = 0; j < K - 1; ++j)
      for (int a = 0; a < K; ++a) MtM(i, j) += M(a, i) * M(a, j);
  }
  const Vec delta = LuFactor<double>(MtM).solve(Mtb);
  double lin = 0.0;
  for (int a = 0; a < K; ++a) {
    double s = -rhs[a];
    for (int l = 0; l < K - 1; ++l) s += M(a, l) * delta[l];
    lin = std::max(lin, std::abs(s));
  }
  book.record("equivalence.translation_solve", lin, lin, zero_tol(tol));

  const auto x = compose(spec);
  const auto xb = compose(bar);
  const auto xt = compose(tilde);
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(x.domain, n_samples, rng);
  auto results = parallel_map<CheckBook>(n_samples, [&](int s) {
    CheckBook b;
    const Vec& u = samples[s];
    try {
      const Vec y = x.position(u);
      const Vec yb = xb.position(u);
      const Vec yt = xt.position(u);
      double d1 = 0.0, d2 = 0.0;
      for (int r = 0; r < N; ++r) {
        d1 = std::max(d1, std::abs(y[r] - D(r, r) * yb[r]));
        d2 = std::max(d2, std::abs(yt[r] - Dt(r, r) * y[r]));
      }
      b.record("equivalence.bar_pointwise", d1, d1 / max_abs(y), tol);
      b.record("equivalence.tilde_pointwise", d2, d2 / max_abs(yt), tol);
      Vec v = u;
      for (int l = 0; l < K - 1; ++l) v[l] += delta[l];
      const Vec ys = xb.position(v);
      const double d3 = max_diff(y, ys);
      b.record("equivalence.translation_pointwise", d3, d3 / max_abs(y), tol);

      const auto i0 = compute_invariants(x, u);
      double dg = 0.0, dA = 0.0, dL = 0.0;
      for (const auto* other : {&xb, &xt}) {
        const auto i1 = compute_invariants(*other, u);
        dg = std::max(dg, max_diff(i0.frame.g, i1.frame.g));
        dA = std::max(dA, max_diff(i0.A.data(), i1.A.data()));
        dL = std::max(dL, std::abs(i0.shape.L1 - i1.shape.L1));
      }
      const double gs = max_abs(i0.frame.g);
      b.record("equivalence.invariants.metric", dg, dg / gs, tol);
      b.record("equivalence.invariants.cubic_form", dA, dA / std::max(gs, max_abs(i0.A)), tol);
      b.record("equivalence.invariants.mean_curvature", dL, dL / std::abs(i0.shape.L1), tol);
    } catch (const std::exception& e) {
      b.fail("engine.evaluation", e.what());
    }
    return b;
  });
  for (const auto& r : results) book.merge(r);
  rep.checks = book.finish();

  rep.summary["c"] = c;
  rep.summary["c_prime"] = cp;
  rep.summary["c_tilde"] = c_tilde;
  rep.summary["translation"] = delta;
  const double L1 = predicted_L1(spec);
  const double L1_lit = predicted_L1(literal);
  rep.summary["literal_c_prime"] = {{"L1", L1_lit}, {"rel_gap", std::abs(L1_lit - L1) / std::abs(L1)}};
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- identities

VerificationReport verify_identities(const ImmersionChart& chart, int n_samples, double tol, std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.spec_id = chart.name;
  rep.suite = "identities";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(chart.domain, n_samples, rng);
  bool sphere = false;
  if (n_samples >= 3) {
    const auto v = classify_sphere(chart, samples, tol);
    sphere = v.is_proper;
    rep.summary["sphere"] = {{"proper", v.is_proper}, {"L1", v.L1}, {"failure", v.failure}};
  }
  auto results = parallel_map<CheckBook>(n_samples, [&](int s) {
    CheckBook b;
    try {
      record_identities(b, compute_invariants(chart, samples[s]), tol, sphere);
      if (!sphere) b.skip("identity.gauss_sphere", "chart not certified as a proper affine sphere");
    } catch (const std::exception& e) {
      b.fail("engine.evaluation", e.what());
    }
    return b;
  });
  CheckBook book;
  for (const auto& r : results) book.merge(r);
  rep.checks = book.finish();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- parallel cubic form

ParallelMeasure measure_parallel(const ImmersionChart& chart, const std::vector<Vec>& samples, double tol) {
  ParallelMeasure m;
  double scale = 0.0;
  for (const auto& u : samples) {
    const auto inv = compute_invariants(chart, u);
    m.nabla_norm = std::max(m.nabla_norm, max_abs(inv.nablaA));
    m.A_norm = std::max(m.A_norm, max_abs(inv.A));
    scale = std::max({scale, max_abs(inv.A), max_abs(inv.frame.g)});
  }
  m.ratio = m.nabla_norm / scale;
  m.parallel = m.ratio <= tol;
  return m;
}

VerificationReport verify_parallel(const CompositionSpec& spec, double tol, int n_samples, std::uint64_t seed) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.spec_id = spec_label(spec);
  rep.suite = "parallel";
  rep.samples = n_samples;
  rep.seed = seed;
  rep.tolerance = tol;
  const auto lay = layout(spec);
  const auto chart = compose(spec);
  std::mt19937_64 rng(seed);
  const auto samples = sample_box(chart.domain, n_samples, rng);
  CheckBook book;
  auto to_json = [](const ParallelMeasure& m) {
    return ordered_json{{"nabla_A", m.nabla_norm}, {"A", m.A_norm}, {"ratio", m.ratio}, {"parallel", m.parallel}};
  };
  try {
    const auto whole = measure_parallel(chart, samples, tol);
    bool all = true;
    ordered_json factors = ordered_json::array();
    for (int a = 1; a <= lay.K; ++a) {
      if (lay.dims[a - 1] == 0) continue;
      std::vector<Vec> fs;
      for (const auto& u : samples) fs.push_back(split_point(lay, u)[a - 1]);
      const auto m = measure_parallel(spec.factors[a - 1].chart(), fs, tol);
      all = all && m.parallel;
      auto j = to_json(m);
      j["factor"] = a;
      j["kind"] = spec.factors[a - 1].describe();
      factors.push_back(j);
    }
    const bool consistent = whole.parallel == all;
    book.record("parallel.iff", consistent ? 0.0 : 1.0, consistent ? 0.0 : 1.0, 0.0);
    if (!consistent) {
      book.fail("parallel.iff", "composition verdict differs from the factors' verdict");
    }
    rep.summary["composition"] = to_json(whole);
    rep.summary["factors"] = factors;
    rep.summary["all_factors_parallel"] = all;
  } catch (const std::exception& e) {
    book.fail("engine.evaluation", e.what());
  }
  rep.checks = book.finish();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

}  // namespace calabi
