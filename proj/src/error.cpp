#include "gaitemo/error.hpp"

namespace gaitemo {

namespace {

std::string located(std::size_t line, std::size_t column, const std::string& what) {
  if (line == 0) return what;
  std::string out = "line " + std::to_string(line);
  if (column != 0) out += ", column " + std::to_string(column);
  return out + ": " + what;
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::size_t column,
                       const std::string& what)
    : Error(located(line, column, what)), kind_(kind), line_(line), column_(column) {}

ParseError::ParseError(const ParseError& inner, const std::string& prefix)
    : Error(prefix + inner.what()),
      kind_(inner.kind_),
      line_(inner.line_),
      column_(inner.column_) {}

WindowTooShort::WindowTooShort(std::size_t frames)
    : DataError("window of " + std::to_string(frames) +
                " frames is too short for movement features (need 4)") {}

}  // namespace gaitemo
