#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad index, negative weight, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Problems with input data. `line()` is 1-based, 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class LabelError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// Raised when a brute-force enumeration would exceed its size budget.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Raised by the solver when the loss becomes non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Duplicate interpolation points carrying different targets.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace grab
