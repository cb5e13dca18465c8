#pragma once

#include <stdexcept>
#include <string>

namespace cph {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed netlist or sidecar input. Line/column are one-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int col = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what
                       : what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Well-formed input that violates a modelling assumption (connectivity, A1/A2, SPD, tree optimality).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// Structural analysis did not succeed (no finite transversal, singular System Jacobian).
class SaFailure : public Error {
 public:
  using Error::Error;
};

// A state the theory rules out; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

// Time integration failed (step underflow, non-finite right-hand side).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cph
