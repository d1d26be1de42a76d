#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irradcast {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain an operation accepts (short series, timestamp
/// outside the ephemeris window, not enough history for a forecast).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector lengths or lag-vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based and counts the header row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class OrderingError : public ParseError {
 public:
  using ParseError::ParseError;
};

class CadenceError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Fitted ARIMA polynomial has a root on or inside the unit circle margin,
/// or the optimizer did not produce a usable model.
class UnstableModelError : public Error {
 public:
  using Error::Error;
};

class TrainingTimeoutError : public Error {
 public:
  using Error::Error;
};

/// Threshold neighborhood with no reference pattern inside the radius.
class EmptyNeighborhoodError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace irradcast
