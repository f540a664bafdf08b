#pragma once

#include <stdexcept>
#include <string>

namespace logbarrier {

// Every error raised by the library derives from Error, so callers that only
// care about "something went wrong" can catch a single type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch or an argument outside its documented range.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A model whose layer dimensions do not chain or whose parameters are unusable.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Malformed model document or dataset file. The message carries the line or
// field that failed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed data with out-of-range values (e.g. a pixel outside [0,1]).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

// The barrier is undefined at points that are not misclassified.
class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

class InitializationFailed : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

}  // namespace logbarrier
