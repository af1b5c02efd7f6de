#pragma once

#include <stdexcept>
#include <string>

#include "calabi/composition.hpp"
#include "json.hpp"

namespace calabi {

/// Malformed or schema-violating composition spec.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSpecSchema = 1;

/// Top-level document: {"schema": 1, "id": "...", "factors": [...]}.
/// Factor objects carry "kind" plus the kind's parameters and an optional "c".
CompositionSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const CompositionSpec& spec);

/// Throws SpecError for unreadable files as well as for bad content.
CompositionSpec load_spec(const std::string& path);
CompositionSpec parse_spec(const std::string& text);

/// Stable identifier: the spec's id, or a description of its factors and weights.
std::string spec_label(const CompositionSpec& spec);

}  // namespace calabi
