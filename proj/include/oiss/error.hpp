#pragma once

#include <stdexcept>
#include <string>

namespace oiss {

// Base of every error raised by the library. The CLI maps these to exit code 2
// unless they stem from a certificate verdict.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative time,
// p < 1, non-finite value, malformed grid).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A Young function violating its defining properties where an operation needs them.
class InvalidYoungError : public Error {
 public:
  using Error::Error;
};

// Integral or modular over [a, inf) of a function with a nonzero tail.
class DivergentIntegralError : public Error {
 public:
  using Error::Error;
};

// Operation would leave the degree <= 3 piecewise class, or needs constant pieces.
class UnsupportedDegreeError : public Error {
 public:
  using Error::Error;
};

class ModelStateMismatchError : public Error {
 public:
  using Error::Error;
};

// Input not defined on the requested time interval.
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// Certificate (beta, mu, theta) failed its comparison-class checks.
class RejectedCertificateError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace oiss
