#pragma once

#include <stdexcept>
#include <string>

namespace tracerec {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input, violated precondition, or inconsistent configuration.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
  public:
    using Error::Error;
};

/// A numerical routine failed (e.g. an iterative solver did not converge).
class NumericalError : public Error {
  public:
    using Error::Error;
};

}  // namespace tracerec
