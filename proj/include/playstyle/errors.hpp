#pragma once

#include <stdexcept>
#include <string>

namespace playstyle {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dataset or argument violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Requested more records than available without replacement.
class SampleExhausted : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Observation shape is incompatible with the encoder.
class EncodeShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Pre-encoded table has no code for the queried observation digest.
class MissingCode : public Error {
 public:
  explicit MissingCode(const std::string& digest_hex)
      : Error("no code for observation digest " + digest_hex), digest(digest_hex) {}
  std::string digest;
};

/// Pre-encoded table assigns two different codes to one digest.
class DuplicateDigest : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Distributions live over different action spaces.
class SpaceMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Tried to estimate a distribution from zero samples.
class EmptySupport : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Linear algebra failed despite regularization.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The two datasets were encoded with different multiscale encoders.
class EncoderMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No state is shared by both datasets under any encoder; the distance-family
/// measures are undefined (a value of 0 would mean "identical").
class NoComparableStates : public Error {
 public:
  using Error::Error;
};

/// Spectrum grid is not rectangular or the target index is out of range.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace playstyle
