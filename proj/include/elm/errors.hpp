#pragma once

#include <stdexcept>
#include <string>

namespace elm {

// Base of every error raised by the library. The C API maps each subclass
// onto one elm_status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not fit together.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Bad argument value (duplicate index, zero node count, ...).
class ArgumentError : public Error {
public:
  using Error::Error;
};

// A matrix that must be positive definite is not (non-positive pivot).
class SingularityError : public Error {
public:
  using Error::Error;
};

// An update step hit a numerically dependent node or a broken factor.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

// Operation is not valid for the object's current state.
class StateError : public Error {
public:
  using Error::Error;
};

// Malformed input file or unreadable path.
class DataError : public Error {
public:
  using Error::Error;
};

}  // namespace elm
