#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace memograph {

struct SchemaViolation {
  std::string path;  // e.g. "nodes[0].label"; empty for the document root
  std::string message;
};

// Checks `doc` against the subset of JSON Schema that structured-output
// definitions use: type (string or list), properties, required,
// additionalProperties (boolean), items, enum, minLength, minItems,
// minimum, maximum. Unknown keywords are ignored.
std::vector<SchemaViolation> check_schema(const nlohmann::json& doc,
                                          const nlohmann::json& schema);

}  // namespace memograph
