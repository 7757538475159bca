#pragma once

#include <stdexcept>
#include <string>

namespace nearmark {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix is not Hermitian, not unit trace, or has a negative eigenvalue.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Kraus operators do not satisfy sum K^dagger K = I.
class InvalidChannel : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

/// The collision model ran out of fresh environment qubits.
class ResourceExhausted : public Error {
 public:
  using Error::Error;
};

/// Evaluation of a decay rate too close to one of its poles.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double pole) : Error(what), pole_(pole) {}
  double pole() const noexcept { return pole_; }

 private:
  double pole_;
};

}  // namespace nearmark
