#pragma once

#include <stdexcept>
#include <string>

namespace lasdp {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A partition with an empty cluster where a nonempty one is required.
class DegeneratePartition : public Error {
 public:
  using Error::Error;
};

class CovarianceSingular : public Error {
 public:
  using Error::Error;
};

/// 1'Z_k 1 vanished, so the covariance update for block k is undefined.
class EmptySoftCluster : public Error {
 public:
  using Error::Error;
};

class NotRankOne : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared inside an iterative solver.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Bad user input: malformed files, out-of-range parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lasdp
