#include "calabi/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace calabi {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw SpecError("unknown field '" + key + "' in " + where);
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw SpecError(std::string("missing field '") + key + "' in " + where);
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SpecError(std::string("field '") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw SpecError(std::string("missing field '") + key + "' in " + where);
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw SpecError(std::string("field '") + key + "' in " + where + " must be an integer");
  return v.get<int>();
}

CompositionSpec parse_factors(const json& list, const std::string& where, std::string id);

FactorSpec parse_factor(const json& obj, const std::string& where, double& weight) {
  if (!obj.is_object()) throw SpecError(where + " must be an object");
  if (!obj.contains("kind") || !obj.at("kind").is_string()) throw SpecError(where + " needs a string 'kind'");
  const auto kind = obj.at("kind").get<std::string>();
  weight = obj.contains("c") ? number(obj, "c", where) : 1.0;
  try {
    if (kind == "point") {
      only_keys(obj, {"kind", "c", "value"}, where);
      return make_point_factor(obj.contains("value") ? number(obj, "value", where) : 1.0);
    }
    if (kind == "flat") {
      only_keys(obj, {"kind", "c", "n0", "C0"}, where);
      return make_flat_factor(integer(obj, "n0", where), obj.contains("C0") ? number(obj, "C0", where) : 1.0);
    }
    if (kind == "hyperboloid") {
      only_keys(obj, {"kind", "c", "n"}, where);
      return make_hyperboloid_factor(integer(obj, "n", where));
    }
    if (kind == "composite") {
      only_keys(obj, {"kind", "c", "factors"}, where);
      if (!obj.contains("factors")) throw SpecError("missing field 'factors' in " + where);
      return make_composite_factor(parse_factors(obj.at("factors"), where, {}));
    }
  } catch (const std::invalid_argument& e) {
    throw SpecError(where + ": " + e.what());
  }
  throw SpecError("unknown factor kind '" + kind + "' in " + where);
}

CompositionSpec parse_factors(const json& list, const std::string& where, std::string id) {
  if (!list.is_array()) throw SpecError("'factors' in " + where + " must be an array");
  std::vector<FactorSpec> factors;
  std::vector<double> weights;
  for (std::size_t i = 0; i < list.size(); ++i) {
    double w = 1.0;
    factors.push_back(parse_factor(list[i], where + ".factors[" + std::to_string(i) + "]", w));
    weights.push_back(w);
  }
  try {
    return make_spec(std::move(factors), std::move(weights), std::move(id));
  } catch (const std::invalid_argument& e) {
    throw SpecError(where + ": " + e.what());
  }
}

json factor_to_json(const FactorSpec& f, double c) {
  json out = json::object();
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PointFactor>) {
          out["kind"] = "point";
          if (k.value != 1.0) out["value"] = k.value;
        } else if constexpr (std::is_same_v<T, FlatFactor>) {
          out["kind"] = "flat";
          out["n0"] = k.n0;
          out["C0"] = k.C0;
        } else if constexpr (std::is_same_v<T, HyperboloidFactor>) {
          out["kind"] = "hyperboloid";
          out["n"] = k.n;
        } else {
          out["kind"] = "composite";
          out["factors"] = json::array();
          for (int a = 0; a < k.inner->K(); ++a)
            out["factors"].push_back(factor_to_json(k.inner->factors[a], k.inner->weights[a]));
        }
      },
      f.kind());
  out["c"] = c;
  return out;
}

}  // namespace

CompositionSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw SpecError("spec must be a JSON object");
  only_keys(doc, {"schema", "id", "factors"}, "spec");
  if (!doc.contains("schema")) throw SpecError("missing field 'schema'");
  if (!doc.at("schema").is_number_integer() || doc.at("schema").get<int>() != kSpecSchema)
    throw SpecError("unsupported schema version (expected 1)");
  std::string id;
  if (doc.contains("id")) {
    if (!doc.at("id").is_string()) throw SpecError("'id' must be a string");
    id = doc.at("id").get<std::string>();
  }
  if (!doc.contains("factors")) throw SpecError("missing field 'factors'");
  return parse_factors(doc.at("factors"), "spec", std::move(id));
}

json spec_to_json(const CompositionSpec& spec) {
  json out = json::object();
  out["schema"] = kSpecSchema;
  if (!spec.id.empty()) out["id"] = spec.id;
  out["factors"] = json::array();
  for (int a = 0; a < spec.K(); ++a) out["factors"].push_back(factor_to_json(spec.factors[a], spec.weights[a]));
  return out;
}

CompositionSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  return spec_from_json(doc);
}

CompositionSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_label(const CompositionSpec& spec) {
  if (!spec.id.empty()) return spec.id;
  std::ostringstream os;
  os << "compose[";
  for (int a = 0; a < spec.K(); ++a) {
    if (a) os << ",";
    os << spec.factors[a].describe();
    if (spec.weights[a] != 1.0) os << "*" << spec.weights[a];
  }
  os << "]";
  return os.str();
}

}  // namespace calabi
