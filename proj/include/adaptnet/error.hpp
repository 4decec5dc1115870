#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adaptnet {

/// Precondition violated by caller-supplied data (empty curves, bad sizes, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A motion or policy action outside the configured action set.
class InvalidAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// API misuse, e.g. backpropagating through a stale forward cache.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration rejected; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A metrics frame lacks columns required by an export kind.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<std::string> missing)
      : std::runtime_error(describe(missing)), missing_(std::move(missing)) {}

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  static std::string describe(const std::vector<std::string>& missing) {
    std::string text = "missing columns:";
    for (const auto& m : missing) text += " " + m;
    return text;
  }

  std::vector<std::string> missing_;
};

}  // namespace adaptnet
