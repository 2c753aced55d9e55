// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfraud {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input record. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Feature-name schema of an input does not match what a model was fitted on.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// External sentiment/NER service failed (network, auth, bad payload).
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace cfraud
