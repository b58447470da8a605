#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsatlink {

/// Base class for all qsatlink errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a precondition.
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// The inputs are outside the validity region of the physical model
/// (e.g. elevation below the plane-parallel airmass floor).
class OutOfModelError : public Error {
public:
  using Error::Error;
};

/// Not enough data to produce the requested estimate.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  explicit ParseError(const std::string& msg) : ParseError(msg, 0) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace qsatlink
