#pragma once

#include <stdexcept>
#include <string>

namespace fairnn {

enum class ErrorKind { kDimension, kState, kNumeric, kIo, kSchema, kConfig };

/// Base of every exception thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::kDimension, what) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& what) : Error(ErrorKind::kState, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::kNumeric, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorKind::kSchema, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

}  // namespace fairnn
