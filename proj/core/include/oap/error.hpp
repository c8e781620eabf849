#pragma once

#include <stdexcept>
#include <string>

namespace oap {

/// Invalid user-supplied parameters (grid spec, sensor, config document).
/// `field()` carries a dotted path such as "motion.v_ego" when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {});
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed grid, CSV or config file contents.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid objects passed between stages (e.g. a path whose
/// consecutive nodes are not grid neighbours).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a closed-form bound.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The goal cannot be reached through valid nodes.
class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures; the message names the path involved.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oap
