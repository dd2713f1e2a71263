#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace manet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchedulingInPast : public Error {
 public:
  using Error::Error;
};

class NonPositiveRate : public Error {
 public:
  using Error::Error;
};

class EmptyObservation : public Error {
 public:
  using Error::Error;
};

class UnstableQueue : public Error {
 public:
  using Error::Error;
};

class UnsupportedDistribution : public Error {
 public:
  using Error::Error;
};

class NotConnected : public Error {
 public:
  using Error::Error;
};

/// A simulator bug: an invariant that must hold by construction did not.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `offset()` is a byte offset for single-line
/// grammars and a 1-based line number for config files.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Scenario configuration problems. `key()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class UnknownKey : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidValue : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace manet
