// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/random_specs.hpp"
#include "../support/rational_oracle.hpp"
#include "calabi/spec_io.hpp"
#include "calabi/verify.hpp"

using namespace calabi;
using namespace calabi::testing;

namespace {

constexpr int kSpecs = 25;
constexpr int kSamples = 10;
constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = true;
  std::string detail;
  double worst = 0.0;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + why;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel_of(const VerificationReport& rep, const std::string& name) {
  const Check* c = rep.find(name);
  if (!c) return std::numeric_limits<double>::infinity();
  if (c->status == "skipped") return 0.0;
  if (c->status == "error") return std::numeric_limits<double>::infinity();
  return c->max_rel_residual;
}

// Shared fixtures: the random family and one verify_spec run per member.
struct Family {
  std::vector<CompositionSpec> specs;
  std::vector<VerificationReport> reports;
};

Family build_family() {
  Family fam;
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < kSpecs; ++i) {
    auto spec = random_spec(rng);
    spec.id = "random-" + std::to_string(i);
    fam.specs.push_back(spec);
    fam.reports.push_back(verify_spec(spec, kSamples, 1e-8, kSeed + i));
  }
  return fam;
}

Outcome criterion_sphere(const Family& fam) {
  Outcome o;
  for (std::size_t i = 0; i < fam.specs.size(); ++i) {
    const auto& spec = fam.specs[i];
    const auto chart = compose(spec);
    std::mt19937_64 rng(kSeed + i);
    const auto samples = sample_box(chart.domain, kSamples, rng);
    const auto v = classify_sphere(chart, samples, 1e-8);
    const double want = predicted_L1(spec);
    const double gap = std::abs(v.L1 - want) / std::abs(want);
    o.worst = std::max(o.worst, gap);
    o.require(v.is_proper && v.hyperbolic, spec.id + " not certified: " + v.failure);
    o.require(gap <= 1e-8, spec.id + " L1 gap " + sci(gap));
  }
  return o;
}

Outcome criterion_checks(const Family& fam, const std::vector<std::pair<std::string, double>>& limits) {
  Outcome o;
  for (const auto& rep : fam.reports)
    for (const auto& [name, lim] : limits) {
      const double r = rel_of(rep, name);
      o.worst = std::max(o.worst, r);
      o.require(r <= lim, rep.spec_id + " " + name + " " + sci(r));
    }
  return o;
}

Outcome criterion_flat() {
  Outcome o;
  for (int n0 = 1; n0 <= 3; ++n0)
    for (double C0 : {0.5, 1.0, 3.0}) {
      const auto f = make_flat_factor(n0, C0);
      const auto cf = flat_closed_forms(n0, C0);
      const std::string tag = "flat(" + std::to_string(n0) + "," + sci(C0) + ")";
      std::mt19937_64 rng(n0 * 100 + static_cast<int>(C0 * 10));
      // the same spot as n0+1 points with weights (1, ..., 1, C0)
      std::vector<double> w(n0 + 1, 1.0);
      w.back() = C0;
      const auto pts = make_spec(std::vector<FactorSpec>(n0 + 1, make_point_factor()), w);
      const auto pts_chart = compose(pts);
      for (const auto& u : sample_box(f.domain(), 5, rng)) {
        const auto inv = compute_invariants(f.chart(), u);
        const double gs = max_abs(cf.g);
        double dg = 0.0, dA = 0.0;
        for (int i = 0; i < n0; ++i)
          for (int j = 0; j < n0; ++j) {
            dg = std::max(dg, std::abs(inv.frame.g(i, j) - cf.g(i, j)) / gs);
            for (int k = 0; k < n0; ++k)
              dA = std::max(dA, std::abs(inv.A(i, j, k) - cf.A(i, j, k)) / std::max(gs, max_abs(cf.A)));
          }
        const double dL = std::abs(inv.shape.L1 - cf.L1) / std::abs(cf.L1);
        o.worst = std::max({o.worst, dg, dA, dL});
        o.require(dg <= 1e-10, tag + " g " + sci(dg));
        o.require(dA <= 1e-10, tag + " A " + sci(dA));
        o.require(dL <= 1e-10, tag + " L1 " + sci(dL));
        if (n0 >= 2) {
          const double J = flat_pick_invariant(n0, C0);
          const double dJ = std::abs(J + cf.L1) / std::abs(cf.L1);
          const double dJe = inv.J ? std::abs(*inv.J - J) / J : 1.0;
          o.worst = std::max({o.worst, dJ, dJe});
          o.require(dJ <= 1e-10, tag + " J+L1 " + sci(dJ));
          o.require(dJe <= 1e-10, tag + " engine J " + sci(dJe));
        }
        // points composition vs flat chart
        const auto pinv = compute_invariants(pts_chart, u);
        double dp = 0.0;
        for (std::size_t a = 0; a < inv.x.size(); ++a) dp = std::max(dp, std::abs(inv.x[a] - pinv.x[a]) / max_abs(inv.x));
        for (int i = 0; i < n0; ++i)
          for (int j = 0; j < n0; ++j) {
            dp = std::max(dp, std::abs(inv.frame.g(i, j) - pinv.frame.g(i, j)) / gs);
            for (int k = 0; k < n0; ++k)
              dp = std::max(dp, std::abs(inv.A(i, j, k) - pinv.A(i, j, k)) / std::max(gs, max_abs(inv.A)));
          }
        dp = std::max(dp, std::abs(inv.shape.L1 - pinv.shape.L1) / std::abs(inv.shape.L1));
        o.require(dp <= 1e-9, tag + " points composition " + sci(dp));
      }
    }
  return o;
}

std::vector<FactorSpec> law_catalog() {
  return {make_point_factor(),         make_point_factor(2.0),      make_flat_factor(1, 1.0),
          make_flat_factor(2, 0.5),    make_hyperboloid_factor(1),  make_hyperboloid_factor(2),
          make_composite_factor(make_spec({make_point_factor(), make_flat_factor(1, 2.0)}, {1.0, 0.7}))};
}

Outcome criterion_laws(const Family& fam) {
  Outcome o;
  auto absorb = [&](const VerificationReport& rep) {
    for (const auto& c : rep.checks) {
      o.worst = std::max(o.worst, c.max_rel_residual);
      o.require(c.ok(), rep.suite + " " + rep.spec_id + " " + c.name + " " + sci(c.max_rel_residual));
    }
  };
  const auto cat = law_catalog();
  for (const auto& a : cat)
    for (const auto& b : cat) absorb(verify_commutativity(a, b, 1e-12, 4, kSeed));
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<std::size_t> pick(0, cat.size() - 1);
  for (int i = 0; i < 20; ++i) absorb(verify_associativity(cat[pick(rng)], cat[pick(rng)], cat[pick(rng)], 1e-12, 4, kSeed + i));
  for (const auto& spec : fam.specs) {
    const auto rep = verify_equivalence_triple(spec, 1e-9, 4, kSeed);
    absorb(rep);
    const double det = rep.find("equivalence.witness_determinant")->max_abs_residual;
    o.require(det <= 1e-10, spec.id + " |det-1| " + sci(det));
  }
  return o;
}

Outcome criterion_identities(const Family& fam) {
  auto o = criterion_checks(fam, {{"identity.apolarity", 1e-9},
                                  {"identity.trace", 1e-8},
                                  {"identity.gauss", 1e-8},
                                  {"identity.gauss_sphere", 1e-8},
                                  {"identity.codazzi", 1e-8},
                                  {"mean_curvature_vectors.pairings", 1e-8}});
  // factor charts on their own
  std::vector<FactorSpec> charts{make_flat_factor(1, 0.5), make_flat_factor(2, 3.0), make_flat_factor(3, 1.0),
                                 make_hyperboloid_factor(1), make_hyperboloid_factor(2), make_hyperboloid_factor(3)};
  for (const auto& f : charts) {
    const auto rep = verify_identities(f.chart(), kSamples, 1e-8, kSeed);
    for (const auto& c : rep.checks) {
      o.worst = std::max(o.worst, c.max_rel_residual);
      o.require(c.ok(), f.describe() + " " + c.name + " " + sci(c.max_rel_residual));
    }
  }
  return o;
}

Outcome criterion_parallel(const Family& fam) {
  Outcome o;
  int flat_specs = 0;
  for (const auto& spec : fam.specs) {
    const auto rep = verify_parallel(spec, 1e-8, kSamples, kSeed);
    o.require(rep.find("parallel.iff") && rep.find("parallel.iff")->ok(), spec.id + " iff verdict inconsistent");
    if (only_flat_factors(spec)) {
      ++flat_specs;
      const auto& m = rep.summary["composition"];
      // A vanishes on curves; the report's ratio is then against |g|
      const double a = m["A"].get<double>();
      const double r = a > 1e-12 ? m["nabla_A"].get<double>() / a : m["ratio"].get<double>();
      o.worst = std::max(o.worst, r);
      o.require(r <= 1e-8, spec.id + " |nabla A|/|A| " + sci(r));
    }
  }
  // a dedicated flat-only family, so the bound is never vacuous
  std::mt19937_64 rng(kSeed + 1);
  std::uniform_real_distribution<double> c(0.5, 3.0);
  for (int i = 0; i < 5; ++i) {
    const auto spec = make_spec({make_point_factor(c(rng)), make_flat_factor(1 + i % 3, c(rng)), make_point_factor()},
                                {c(rng), c(rng), c(rng)});
    const auto m = measure_parallel(compose(spec), sample_box(sample_domain(spec), 4, rng), 1e-8);
    const double r = m.nabla_norm / m.A_norm;
    ++flat_specs;
    o.worst = std::max(o.worst, r);
    o.require(r <= 1e-8, "flat family " + std::to_string(i) + " " + sci(r));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(flat_specs) + " flat-only compositions";
  return o;
}

Outcome criterion_jets() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    const int order = std::uniform_int_distribution<int>(1, 4)(rng);
    const int depth = std::uniform_int_distribution<int>(2, 4)(rng);
    ExprGen gen(n, rng);
    const auto e = gen.make(depth);
    std::vector<Rational> base;
    for (int v = 0; v < n; ++v) base.push_back(gen.small());
    const auto gap = compare_with_oracle(*e, base, order);
    compared += gap.compared;
    o.worst = std::max(o.worst, gap.max_rel);
    o.require(gap.max_rel <= 1e-13, "expression " + std::to_string(i) + " " + sci(gap.max_rel));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(compared) + " derivatives";
  return o;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const Family fam = build_family();
  const double family_s = std::chrono::duration<double>(Clock::now() - t0).count();

  struct Row {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Row> rows{
      {1, "composed-sphere certification (25 specs, L1 to 1e-8)", [&] { return criterion_sphere(fam); }},
      {2, "metric blocks (1e-8)",
       [&] { return criterion_checks(fam, {{"metric.match", 1e-8}, {"metric.block_orthogonality", 1e-8}}); }},
      {3, "cubic form families (1e-8), inadmissible components (1e-10 |A|)",
       [&] { return criterion_checks(fam, {{"fubini_pick.match", 1e-8}, {"fubini_pick.admissible_families", 1e-10}}); }},
      {4, "induced connection (1e-8)", [&] { return criterion_checks(fam, {{"christoffel.match", 1e-8}}); }},
      {5, "flat example constants (1e-10), points = flat (1e-9)", [] { return criterion_flat(); }},
      {6, "commutativity, associativity, equivalence triple", [&] { return criterion_laws(fam); }},
      {7, "structural identities", [&] { return criterion_identities(fam); }},
      {8, "parallel cubic form criterion", [&] { return criterion_parallel(fam); }},
      {9, "jet engine vs rational oracle (100 expressions, 1e-13)", [] { return criterion_jets(); }},
  };
  bool all = true;
  for (const auto& row : rows) {
    const auto start = Clock::now();
    const Outcome o = row.run();
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (row.id == 1) secs += family_s;
    all = all && o.pass;
    std::printf("criterion %d: %s  %s  [worst %s, %.1f s]%s%s\n", row.id, o.pass ? "PASS" : "FAIL", row.title,
                sci(o.worst).c_str(), secs, o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
