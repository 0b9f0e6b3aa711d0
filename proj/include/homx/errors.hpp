#pragma once

#include <stdexcept>
#include <string>

namespace homx {

// Base for everything thrown on purpose. Callers that want structured
// handling catch the derived types; the CLI maps them to exit code 2
// (input/usage) or a verification finding.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: bad prime, non-associative table, action that is not
// an action, d^2 != 0, mismatched dimensions inside one object.
struct ValueError : Error {
  using Error::Error;
};

// Two objects that must live over the same field/algebra do not.
struct MismatchError : Error {
  using Error::Error;
};

// Matrix shape disagreement in an operation.
struct ShapeError : Error {
  using Error::Error;
};

// A requested factorization does not exist. This is a finding, not a bug:
// it is how "phi is not a precover for this source" surfaces.
struct NoLiftError : Error {
  using Error::Error;
};

// A construction hypothesis failed (e.g. componentwise precover not monic).
struct HypothesisError : Error {
  int degree;
  HypothesisError(const std::string& msg, int deg) : Error(msg), degree(deg) {}
};

// Tower parameters too small for the input's support.
struct NonStabilizedError : Error {
  using Error::Error;
};

// Degree range falls outside what a finite-window object can answer for.
struct WindowError : Error {
  using Error::Error;
};

// An internal invariant re-check failed. Seeing this means a bug.
struct CheckError : Error {
  using Error::Error;
};

}  // namespace homx
