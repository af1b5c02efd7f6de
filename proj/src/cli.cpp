#include "calabi/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "calabi/spec_io.hpp"
#include "calabi/verify.hpp"

namespace calabi {

using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ordered_json to_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

ordered_json to_json(const Tensor3& t) {
  const int n = t.dim();
  ordered_json out = ordered_json::array();
  for (int i = 0; i < n; ++i) {
    ordered_json a = ordered_json::array();
    for (int j = 0; j < n; ++j) {
      ordered_json b = ordered_json::array();
      for (int k = 0; k < n; ++k) b.push_back(t(i, j, k));
      a.push_back(b);
    }
    out.push_back(a);
  }
  return out;
}

// "a.b[2].c,value" rows; numbers at 17 significant digits
void flatten(const ordered_json& j, const std::string& key, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, key.empty() ? k : key + "." + k, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], key + "[" + std::to_string(i) + "]", os);
  } else if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    os << key << ',' << buf << '\n';
  } else if (j.is_string()) {
    os << key << ',' << j.get<std::string>() << '\n';
  } else {
    os << key << ',' << j.dump() << '\n';
  }
}

std::string render(const ordered_json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  std::ostringstream os;
  os << "key,value\n";
  flatten(doc, "", os);
  return os.str();
}

std::string render_reports(const std::vector<VerificationReport>& reps, const std::string& format) {
  if (format == "csv") {
    std::string all;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      std::string csv = reps[i].to_csv();
      if (i > 0) csv.erase(0, csv.find('\n') + 1);  // one header
      all += csv;
    }
    return all;
  }
  if (reps.size() == 1) return reps[0].to_json().dump(2) + "\n";
  ordered_json doc;
  bool ok = true;
  for (const auto& r : reps) ok = ok && r.passed();
  doc["suite"] = "laws";
  doc["passed"] = ok;
  doc["reports"] = ordered_json::array();
  for (const auto& r : reps) doc["reports"].push_back(r.to_json());
  return doc.dump(2) + "\n";
}

ordered_json compose_json(const CompositionSpec& spec) {
  const auto lay = layout(spec);
  const auto [c, cp] = normalization_constants(spec);
  ordered_json j;
  j["spec_id"] = spec_label(spec);
  j["K"] = lay.K;
  j["n"] = lay.n;
  j["ambient_dimension"] = lay.n + 1;
  j["points"] = spec.points();
  j["positive_dimensional"] = spec.spheres();
  j["dims"] = lay.dims;
  j["f"] = std::vector<int>(lay.f.begin() + 1, lay.f.end());
  j["C"] = structure_constant(spec);
  j["L1"] = predicted_L1(spec);
  j["normalization"] = {{"c", c}, {"c_prime", cp}};
  ordered_json factors = ordered_json::array();
  for (int a = 1; a <= lay.K; ++a)
    factors.push_back({{"kind", spec.factors[a - 1].describe()},
                       {"weight", spec.weights[a - 1]},
                       {"L1", spec.factors[a - 1].L1()}});
  j["factors"] = factors;
  return j;
}

ordered_json invariants_json(const CompositionSpec& spec, const CliConfig& cfg) {
  const auto chart = compose(spec);
  std::vector<Vec> pts = cfg.points;
  if (pts.empty()) {
    std::mt19937_64 rng(cfg.seed);
    pts = sample_box(chart.domain, cfg.samples, rng);
  }
  ordered_json j;
  j["spec_id"] = spec_label(spec);
  j["n"] = chart.dim;
  j["L1_predicted"] = predicted_L1(spec);
  j["points"] = ordered_json::array();
  for (const auto& u : pts) {
    if (static_cast<int>(u.size()) != chart.dim)
      throw UsageError("--point needs " + std::to_string(chart.dim) + " coordinates, got " +
                       std::to_string(u.size()));
    const auto inv = compute_invariants(chart, u);
    ordered_json p;
    p["u"] = u;
    p["x"] = inv.x;
    p["affine_normal"] = inv.xi;
    p["H"] = inv.frame.H;
    p["g"] = to_json(inv.frame.g);
    p["cubic_form"] = to_json(inv.A);
    p["connection"] = to_json(inv.Gamma);
    p["shape_operator"] = to_json(inv.shape.B);
    p["principal_curvatures"] = inv.shape.eigenvalues;
    p["L1"] = inv.shape.L1;
    if (inv.J) p["J"] = *inv.J;
    p["route_mismatch"] = inv.route_mismatch;
    j["points"].push_back(p);
  }
  return j;
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad --point coordinate '" + item + "'");
    }
  }
  return v;
}

void emit(const std::string& text, const CliConfig& cfg, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + cfg.output_path);
  f << text;
  if (!f) throw UsageError("write failed: " + cfg.output_path);
}

void summarize(const std::vector<VerificationReport>& reps, std::ostream& err) {
  for (const auto& r : reps) {
    int failed = 0;
    std::string names;
    for (const auto& c : r.checks)
      if (!c.ok()) {
        ++failed;
        names += (names.empty() ? "" : ", ") + c.name;
      }
    err << r.suite << ' ' << r.spec_id << ": ";
    if (failed == 0)
      err << "PASS (" << r.checks.size() << " checks, " << r.runtime_seconds << " s)\n";
    else
      err << "FAIL " << failed << '/' << r.checks.size() << " [" << names << "]\n";
  }
}

std::vector<VerificationReport> run_laws(const CompositionSpec& spec, const CliConfig& cfg) {
  std::vector<VerificationReport> reps;
  const auto& f = spec.factors;
  reps.push_back(verify_commutativity(f[0], f[1], cfg.tol, cfg.samples, cfg.seed));
  if (spec.K() >= 3) reps.push_back(verify_associativity(f[0], f[1], f[2], cfg.tol, cfg.samples, cfg.seed));
  reps.push_back(verify_equivalence_triple(spec, cfg.tol, cfg.samples, cfg.seed));
  return reps;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  std::vector<std::string> point_text;
  CLI::App app{"Calabi compositions of affine hyperspheres: compose, evaluate, verify"};
  app.name(args.empty() ? "calabi" : args[0]);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("--spec", cfg.spec_path, "composition spec (JSON)")->required();
    sub->add_option("-o,--output", cfg.output_path, "write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (sampling) {
      sub->add_option("--samples", cfg.samples, "sample points")->check(CLI::PositiveNumber);
      sub->add_option("--seed", cfg.seed, "RNG seed");
    }
  };
  auto* compose_cmd = app.add_subcommand("compose", "structure constants of the composition");
  common(compose_cmd, false);
  auto* inv_cmd = app.add_subcommand("invariants", "engine invariants at given or sampled points");
  common(inv_cmd, true);
  inv_cmd->add_option("--point", point_text, "comma separated chart coordinates (repeatable)");
  auto* verify_cmd = app.add_subcommand("verify", "closed forms against the engine");
  common(verify_cmd, true);
  auto* laws_cmd = app.add_subcommand("laws", "commutativity, associativity, equivalence triple");
  common(laws_cmd, true);
  for (auto* sub : {verify_cmd, laws_cmd})
    sub->add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::bad_arguments;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  CompositionSpec spec;
  try {
    spec = load_spec(cfg.spec_path);
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::bad_spec;
  }

  try {
    if (cfg.command == "compose") {
      emit(render(compose_json(spec), cfg.format), cfg, out);
      return exit_code::ok;
    }
    if (cfg.command == "invariants") {
      for (const auto& p : point_text) cfg.points.push_back(parse_point(p));
      emit(render(invariants_json(spec, cfg), cfg.format), cfg, out);
      return exit_code::ok;
    }
    std::vector<VerificationReport> reps;
    if (cfg.command == "verify")
      reps.push_back(verify_spec(spec, cfg.samples, cfg.tol, cfg.seed));
    else
      reps = run_laws(spec, cfg);
    emit(render_reports(reps, cfg.format), cfg, out);
    summarize(reps, err);
    for (const auto& r : reps)
      if (!r.passed()) return exit_code::failed_checks;
    return exit_code::ok;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::bad_arguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failed_checks;
  }
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace calabi
