#pragma once

#include <stdexcept>
#include <string>

namespace ecgsynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, violated preconditions, dimension mismatches.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling exhausted its attempt budget.
class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

/// Too few samples/intervals for a spectral estimate.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A ratio or bandwidth collapsed to zero.
class DegenerateComputation : public Error {
 public:
  using Error::Error;
};

/// Bad magic, version, truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File shorter or longer than its header implies.
class LengthError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// CSV/JSON content errors. Carries the 1-based row number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long row = -1)
      : Error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what), detail_(what), row_(row) {}
  long row() const noexcept { return row_; }
  /// Message without the row suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  long row_;
};

}  // namespace ecgsynth
