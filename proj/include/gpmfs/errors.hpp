#pragma once

#include <stdexcept>
#include <string>

namespace gpmfs {

/// Base class for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value is out of range or inconsistent.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input text that cannot be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(message + " (line " + std::to_string(line) + ")"),
        raw_(message),
        line_(line) {}
  int line() const { return line_; }
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
  int line_;
};

/// Structurally valid input whose content is out of domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra step failed; carries the solver iteration (0 = init).
class NumericError : public Error {
 public:
  NumericError(const std::string& message, int iteration)
      : Error(message + " (iteration " + std::to_string(iteration) + ")"),
        raw_(message),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
  int iteration_;
};

/// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpmfs
