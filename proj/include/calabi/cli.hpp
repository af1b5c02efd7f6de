#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace calabi {

struct CliConfig {
  std::string command;  // compose | invariants | verify | laws
  std::string spec_path;
  std::string output_path;  // empty: stdout
  int samples = 10;
  double tol = 1e-8;
  std::uint64_t seed = 42;
  std::string format = "json";  // json | csv
  std::vector<std::vector<double>> points;  // invariants only
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed_checks = 1;
inline constexpr int bad_arguments = 2;
inline constexpr int bad_spec = 3;
}  // namespace exit_code

/// Parses args (program name first) and runs the command.
/// The report goes to `out` (or --output), the one-line summary and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace calabi
