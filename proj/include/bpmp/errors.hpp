#pragma once

#include <stdexcept>
#include <string>

namespace bpmp {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstanceError : public Error {
 public:
  using Error::Error;
};

// Input exceeds a documented size limit (oracle scope, node counts).
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// No feasible route exists for the instance.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A model refers to something it does not own (unregistered variable,
// duplicate name, bad fixing request).
class ModelError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Decoded values contradict the structural guarantees of the formulations.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// An external solver returned an assignment that violates the model.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// The external solver could not be started or exited abnormally.
class LaunchError : public Error {
 public:
  using Error::Error;
};

}  // namespace bpmp
