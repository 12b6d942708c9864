#pragma once

#include <stdexcept>
#include <string>

namespace h2kin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mechanism text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

/// Structurally inconsistent mechanism (unknown species, imbalance, duplicates).
class MechanismError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, step-size underflow and similar solver failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace h2kin
