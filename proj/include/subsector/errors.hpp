#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subsector {

enum class ErrorKind {
  parse,
  validation,
  configuration,
  insufficient_data,
  zero_variance,
  domain,
  numerical,
  argument,
  index,
};

const char* to_string(ErrorKind kind);

/// Base for every error raised by the library. `kind()` lets callers (the CLI
/// in particular) map failures onto exit codes without a catch per type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::configuration, message) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& message)
      : Error(ErrorKind::insufficient_data, message) {}
};

class ZeroVarianceError : public Error {
 public:
  ZeroVarianceError(std::size_t asset_index, const std::string& asset);
  std::size_t asset_index() const noexcept { return asset_index_; }
  const std::string& asset() const noexcept { return asset_; }

 private:
  std::size_t asset_index_;
  std::string asset_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorKind::domain, message) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::numerical, message) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error(ErrorKind::argument, message) {}
};

class IndexError : public Error {
 public:
  IndexError(std::size_t index, std::size_t size);
};

}  // namespace subsector
