#pragma once

#include <stdexcept>
#include <string>

namespace vlmd {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite samples or otherwise unusable numeric input.
struct InvalidInputError : Error {
  using Error::Error;
};

// Shape or length mismatch between related arguments.
struct DimensionError : Error {
  using Error::Error;
};

// Solver or generator configuration that cannot be run.
struct ConfigError : Error {
  using Error::Error;
};

// A synthesis spec that cannot produce a valid signal.
struct SpecError : Error {
  using Error::Error;
};

// An operation whose result would be empty (e.g. every column filtered away).
struct EmptyOutputError : Error {
  using Error::Error;
};

// Malformed input file; line is 1-based, 0 when unknown.
struct ParseError : Error {
  int line = 0;
  ParseError(const std::string& msg, int line_no) : Error(msg), line(line_no) {}
};

}  // namespace vlmd
