#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sublab {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorKind {
  invalid_argument,
  parse,
  range,
  dimension,
  cap_exceeded,
  numerical,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error in the coefficient grammar; `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorKind::parse,
              "syntax error at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& message) : Error(ErrorKind::range, message) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error(ErrorKind::dimension, message) {}
};

class CapError : public Error {
 public:
  explicit CapError(const std::string& message) : Error(ErrorKind::cap_exceeded, message) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message) : Error(ErrorKind::numerical, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

}  // namespace sublab
