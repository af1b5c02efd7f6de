#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "calabi/composition.hpp"
#include "json.hpp"

namespace calabi {

struct Check {
  std::string name;
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  double tolerance = 0.0;
  std::string status = "pass";  // pass | fail | skipped | error
  std::string detail;

  bool ok() const { return status == "pass" || status == "skipped"; }
};

struct VerificationReport {
  std::string spec_id;
  std::string suite;
  std::vector<Check> checks;  // sorted by name
  int samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double runtime_seconds = 0.0;  // not serialized: reports stay byte-identical
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  bool passed() const;
  const Check* find(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

/// Accumulates per-sample residuals into checks (max over samples).
class CheckBook {
 public:
  /// pass iff rel <= tol for every recorded sample.
  void record(const std::string& name, double abs, double rel, double tol);
  void fail(const std::string& name, const std::string& detail, double tol = 0.0);
  void skip(const std::string& name, const std::string& reason);
  void merge(const CheckBook& other);
  std::vector<Check> finish() const;

 private:
  std::vector<Check> checks_;
  Check& slot(const std::string& name, double tol);
};

/// Worker count: CALABI_THREADS if set and positive, else hardware concurrency.
int worker_count();

VerificationReport verify_spec(const CompositionSpec& spec, int n_samples, double tol, std::uint64_t seed);
VerificationReport verify_commutativity(const FactorSpec& f1, const FactorSpec& f2, double tol,
                                        int n_samples = 10, std::uint64_t seed = 42);
VerificationReport verify_associativity(const FactorSpec& f1, const FactorSpec& f2, const FactorSpec& f3,
                                        double tol, int n_samples = 10, std::uint64_t seed = 42);
VerificationReport verify_equivalence_triple(const CompositionSpec& spec, double tol, int n_samples = 10,
                                             std::uint64_t seed = 42);
VerificationReport verify_identities(const ImmersionChart& chart, int n_samples, double tol,
                                     std::uint64_t seed = 42);
VerificationReport verify_parallel(const CompositionSpec& spec, double tol, int n_samples = 10,
                                   std::uint64_t seed = 42);

/// max |nabla A| / max(|A|, |g|) over the samples; parallel iff <= tol.
struct ParallelMeasure {
  double nabla_norm = 0.0;
  double A_norm = 0.0;
  double ratio = 0.0;
  bool parallel = false;
};
ParallelMeasure measure_parallel(const ImmersionChart& chart, const std::vector<Vec>& samples, double tol);

/// Block-swap permutation matrix taking (y1, y2) to (y2, y1), blocks of size m1, m2.
Mat block_swap(int m1, int m2);

/// The three exponent identities behind the associativity coordinate change,
/// checked in exact rational arithmetic. Returns the number of mismatches.
int associativity_exponent_mismatches(int n1, int n2, int n3);

}  // namespace calabi
