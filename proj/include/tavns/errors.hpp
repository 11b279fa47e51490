#pragma once

#include <stdexcept>
#include <string>

namespace tavns {

/// Invalid configuration value. `field()` names the offending field path
/// (e.g. "noise.epsilon") when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, std::string field = {})
      : std::runtime_error(msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An operation was called on inputs it does not accept (basis/boundary
/// mismatch, grid mismatch, wrong boundary mode).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A non-finite value appeared during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& msg, long step_index, long path_index = -1)
      : std::runtime_error(msg), step_(step_index), path_(path_index) {}
  long step_index() const noexcept { return step_; }
  long path_index() const noexcept { return path_; }

 private:
  long step_;
  long path_;
};

/// File system or other environment failure.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tavns
