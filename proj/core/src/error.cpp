#include "oap/error.hpp"

#include <utility>

namespace oap {

namespace {

std::string with_field(const std::string& message, const std::string& field) {
  if (field.empty()) return message;
  return field + ": " + message;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string field)
    : std::runtime_error(with_field(message, field)), field_(std::move(field)) {}

}  // namespace oap
