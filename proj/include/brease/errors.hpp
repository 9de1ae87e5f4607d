#ifndef BREASE_ERRORS_HPP
#define BREASE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace brease {

// Base of every library exception. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input data (counts, CSV rows) violate their invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Quadrature non-convergence, failed mode search, degenerate weight tables.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace brease

#endif  // BREASE_ERRORS_HPP
