#pragma once

#include <stdexcept>
#include <string>

namespace trajcast {

// Base for all library errors. Subclasses map to distinct CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad option values, shape/config invariant violations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor shape disagreement between operands.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Invalid data content: out-of-domain values, empty inputs, short trajectories.
class DataError : public Error {
 public:
  using Error::Error;
};

// File content does not match the expected on-disk format.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Filesystem-level failure: missing file, unreadable/unwritable path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trajcast
