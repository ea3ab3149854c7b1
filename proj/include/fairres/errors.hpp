#pragma once

#include <stdexcept>
#include <string>

namespace fairres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector or index does not match the graph size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A state or run invariant was violated (e.g. two adjacent fixed criteria).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive routine asked to work above its configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or infeasible configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// No cover state can anchor a reconstruction.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Means were not supplied for every cover state.
class IncompletenessError : public Error {
 public:
  using Error::Error;
};

/// Algorithm called on an instance it does not support.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Input violates a precondition of the adversarial model.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairres
