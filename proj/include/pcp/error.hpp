#pragma once

#include <stdexcept>
#include <string>

namespace pcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries or a malformed data buffer.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// A rank or subspace dimension outside its admissible range.
class InvalidRank : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity is undefined for the zero matrix.
class ZeroMatrix : public Error {
 public:
  using Error::Error;
};

/// Supplied ridge leverage overestimates fall below the true scores.
class InvalidOverestimate : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested beyond its size cap.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcp
