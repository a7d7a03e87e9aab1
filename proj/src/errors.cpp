#include "memograph/errors.hpp"

#include <sstream>

namespace memograph {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream out;
  out << "validation failed";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    out << (i == 0 ? ": " : "; ") << violations[i];
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

ParseError::ParseError(const std::string& message, std::size_t line,
                       std::string field)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                     : message),
      line_(line),
      field_(std::move(field)) {}

SchemaError::SchemaError(std::string field, const std::string& message)
    : Error(field.empty() ? message : field + ": " + message),
      field_(std::move(field)) {}

}  // namespace memograph
