#pragma once

#include <stdexcept>

namespace coop {

// Base class for all structured errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter, domain, or precondition violations (CLI exit code 2).
struct ValidationError : Error {
  using Error::Error;
};

// File, parse, and format problems (CLI exit code 1).
struct IoError : Error {
  using Error::Error;
};

// A trial that cannot be judged: no cue anywhere in the trace, or the trace
// ends before the judgment sample point (CLI exit code 3).
struct UnjudgeableError : Error {
  using Error::Error;
};

// Numerical degeneracy inside the filter recursion (non-finite state,
// non-positive innovation variance).
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace coop
