#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cantor {

// Argument outside an operation's mathematical domain (x outside [0,1],
// lo >= hi, unnormalized state, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A value object was given fields that break its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace cantor
