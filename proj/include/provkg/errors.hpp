#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace provkg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed SPARQL that uses something outside basic graph patterns.
class UnsupportedFeatureError : public Error {
 public:
  using Error::Error;
};

/// The query graph is not connected through shared variables.
class DisconnectedQueryError : public Error {
 public:
  using Error::Error;
};

/// A query cannot be registered as a standing query.
class RegistrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace provkg
