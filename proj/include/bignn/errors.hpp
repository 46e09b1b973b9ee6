#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bignn {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape incompatibility. Message carries both shapes.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Out-of-range row/segment/label index.
class IndexError : public Error {
public:
  using Error::Error;
};

// Math domain violation (log of non-positive, empty-graph mean, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Bad configuration: unknown variant, missing relation params, dim mismatch
// between checkpoint and dataset, malformed --set override.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Dataset-level problem: schema violation, unknown entity, duplicate id.
class DataError : public Error {
public:
  using Error::Error;
};

// Negative sampling could not find a valid corruption.
class SamplingError : public Error {
public:
  using Error::Error;
};

// Metric undefined on the given input (single class, no positives).
class MetricError : public Error {
public:
  using Error::Error;
};

// Non-finite value where the training loop demands finiteness.
class NumericError : public Error {
public:
  using Error::Error;
};

enum class SmilesErrorKind { Syntax, UnsupportedFeature };

// Parse failure with the byte offset of the offending token.
class SmilesError : public Error {
public:
  SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string& token,
              const std::string& msg)
      : Error(msg + " (token '" + token + "' at byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset),
        token_(token) {}

  SmilesErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }
  const std::string& token() const { return token_; }

private:
  SmilesErrorKind kind_;
  std::size_t offset_;
  std::string token_;
};

}  // namespace bignn
