#pragma once

#include <stdexcept>
#include <string>

namespace otfs {

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a frame is passed in the wrong plane (delay-Doppler vs time-frequency).
class DomainMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an equalizer meets a (numerically) rank-deficient channel.
class SingularChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration error, carrying the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace otfs
