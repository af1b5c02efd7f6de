#include <cstdio>
#include <fstream>
#include <sstream>

#include "calabi/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace calabi;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run call(std::vector<std::string> args) {
  args.insert(args.begin(), "calabi");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return std::string(CALABI_SPECS_DIR) + "/" + name; }

}  // namespace

TEST_CASE("verify twopoints reports the hyperbola constant") {
  const auto r = call({"verify", "--spec", spec("twopoints.json"), "--samples", "10", "--tol", "1e-8", "--seed", "42"});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["passed"].get<bool>());
  CHECK(doc["summary"]["L1_predicted"].get<double>() == doctest::Approx(-std::pow(2.0, -2.0 / 3.0)));
  CHECK(doc["summary"]["L1_engine_mean"].get<double>() == doctest::Approx(-std::pow(2.0, -2.0 / 3.0)));
  CHECK(r.err.find("PASS") != std::string::npos);
}

TEST_CASE("compose prints the f-sequence and C") {
  const auto r = call({"compose", "--spec", spec("pf.json")});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["f"] == nlohmann::json::array({1, 4}));
  CHECK(doc["ambient_dimension"] == 4);
  CHECK(doc["L1"].get<double>() == doctest::Approx(-1.0 / (4.0 * doc["C"].get<double>())));
}

TEST_CASE("exit codes") {
  CHECK(call({"verify", "--spec", "missing.json"}).code == 3);
  CHECK(call({"verify", "--spec", spec("bad_schema.json")}).code == 3);
  CHECK(call({"verify", "--spec", spec("pf.json"), "--samples", "0"}).code == 2);
  CHECK(call({"verify", "--spec", spec("pf.json"), "--tol", "-1"}).code == 2);
  CHECK(call({"verify", "--spec", spec("pf.json"), "--format", "xml"}).code == 2);
  CHECK(call({"verify"}).code == 2);
  CHECK(call({"nonsense"}).code == 2);
  CHECK(call({"--help"}).code == 0);
  CHECK(call({"invariants", "--spec", spec("twopoints.json"), "--point", "0.1,0.2"}).code == 2);
  CHECK(call({"invariants", "--spec", spec("twopoints.json"), "--point", "abc"}).code == 2);
  CHECK(call({"compose", "--spec", spec("pf.json"), "--output", "/nonexistent/dir/out.json"}).code == 2);
}

TEST_CASE("failing checks exit 1 and never print a pass") {
  // a tolerance below double precision cannot hold for every residual
  const auto r = call({"verify", "--spec", spec("mixed.json"), "--tol", "1e-300", "--samples", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("PASS") == std::string::npos);
  CHECK(r.err.find("FAIL") != std::string::npos);
  CHECK_FALSE(nlohmann::json::parse(r.out)["passed"].get<bool>());
}

TEST_CASE("reports are byte identical across runs") {
  const std::vector<std::string> args{"laws", "--spec", spec("mixed.json"), "--samples", "3", "--seed", "9"};
  const auto a = call(args);
  const auto b = call(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const std::string path = "test_cli_out.csv";
  auto args2 = std::vector<std::string>{"verify", "--spec", spec("pf.json"), "--format", "csv", "--output", path};
  CHECK(call(args2).code == 0);
  std::ifstream in(path);
  std::stringstream file;
  file << in.rdbuf();
  std::remove(path.c_str());
  CHECK(file.str() == call({"verify", "--spec", spec("pf.json"), "--format", "csv"}).out);
  CHECK(file.str().rfind("spec_id,suite,check,", 0) == 0);
}

TEST_CASE("invariants at explicit points") {
  const auto r = call({"invariants", "--spec", spec("twopoints.json"), "--point", "0.3", "--point", "-0.1"});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["points"].size() == 2);
  CHECK(doc["points"][0]["x"][0].get<double>() == doctest::Approx(std::exp(0.3)));
  CHECK(doc["points"][1]["L1"].get<double>() == doctest::Approx(-std::pow(2.0, -2.0 / 3.0)));
}
