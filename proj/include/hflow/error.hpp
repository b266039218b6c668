#pragma once

#include <stdexcept>
#include <string>

namespace hflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGridError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the range where the formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The fibering map has no interior maximum (B >= 0).
class NoMaximizerError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A serialized artifact does not match its documented layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace hflow
