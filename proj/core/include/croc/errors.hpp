#ifndef CROC_ERRORS_HPP_
#define CROC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace croc {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix/vector dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid values: non-finite entries, negative weights, out-of-range ids.
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (k_start out of range, non-positive lambda, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Solver breakdown: non-finite scaling potentials, vanished kernel rows.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Pruning removed every cluster; no content is shared across the views.
class EmptyPruneError : public Error {
 public:
  using Error::Error;
};

// File-format errors. Subclasses identify the failure and byte offset.
class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class VersionError : public IoError {
 public:
  using IoError::IoError;
};

class TruncationError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace croc

#endif  // CROC_ERRORS_HPP_
