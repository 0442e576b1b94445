#pragma once

#include <stdexcept>
#include <string>

namespace fcc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A circuit parameter or command input violates its documented bound.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of an operation (time outside a
/// period, too few samples, bad averaging window, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Non-finite value handed to a type whose invariant requires finiteness.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree (e.g. the Jury test and the spectral radius)
/// produced contradicting answers.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

class StepLimitExceeded : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcc
