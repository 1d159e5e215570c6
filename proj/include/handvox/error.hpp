#pragma once

#include <stdexcept>
#include <string>

namespace handvox {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs violate an operation's preconditions (bad dims, mismatched sizes,
// points outside a frame, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed on-disk data. Messages carry a line number or byte offset.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace handvox
