#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaitemo {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: wrong shapes, empty datasets, out-of-range values.
class DataError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  MalformedHeader,
  NonNumeric,
  ColumnCount,
  BadFrameRate,
  TooFewFrames,
  NonFinite,
  Schema,
};

/// Gait/ratings file parse failure. `line` and `column` are 1-based; 0 means
/// "not applicable".
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::size_t column,
             const std::string& what);
  /// Same error with `prefix` (e.g. a file name) prepended to the message.
  ParseError(const ParseError& inner, const std::string& prefix);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Raised by extract_walk_cycle when no foot has two strikes. Callers fall
/// back to the whole-gait window.
class FewerThanTwoStrikes : public Error {
 public:
  FewerThanTwoStrikes() : Error("fewer than two strikes of the same foot") {}
};

/// Movement features need at least four frames in the window.
class WindowTooShort : public DataError {
 public:
  explicit WindowTooShort(std::size_t frames);
};

class NoGaitForEmotion : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace gaitemo
