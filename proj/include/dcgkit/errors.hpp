#pragma once

#include <stdexcept>
#include <string>

namespace dcgkit {

/// Broad failure category; maps onto the CLI exit codes.
enum class ErrorKind { config = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

// Data-side refinements.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};
class StratificationError : public DataError {
 public:
  using DataError::DataError;
};
class FoldError : public DataError {
 public:
  using DataError::DataError;
};
/// Mismatched row/column counts between arguments.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};
/// Requested output dimensionality is not attainable.
class DimensionError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};
class LookupError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace dcgkit
