#pragma once

#include <stdexcept>
#include <string>

namespace deepfeat {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Bad magic, version, dtype or otherwise malformed bytes.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File is shorter than its header claims.
class LengthError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Well-formed data violating a domain invariant (non-finite values, bad labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace deepfeat
