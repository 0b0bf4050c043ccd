#pragma once

#include <stdexcept>
#include <string>

namespace acdc {

// Base of every error the toolkit raises. `kind()` names the error class for
// structured CLI reporting.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Caller supplied something outside an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-input"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

// Numerical routine failed (non-convergent eigensolver, singular system, ...).
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

class DivergedFlow : public NumericError {
 public:
  DivergedFlow(const std::string& what, double residual, int iterations)
      : NumericError(what), residual_(residual), iterations_(iterations) {}
  const char* kind() const noexcept override { return "diverged-flow"; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class DegenerateCircuit : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "degenerate-circuit"; }
};

class AssemblyError : public NumericError {
 public:
  AssemblyError(const std::string& what, std::string subgrid)
      : NumericError(what), subgrid_(std::move(subgrid)) {}
  const char* kind() const noexcept override { return "assembly"; }
  const std::string& subgrid() const noexcept { return subgrid_; }

 private:
  std::string subgrid_;
};

// H2 / DC gain requested on a model where the indicator has no finite value.
class IndicatorUndefined : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "indicator-undefined"; }
};

class InsufficientData : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "insufficient-data"; }
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "undefined-metric"; }
};

class IncompleteMap : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "incomplete-map"; }
};

class UncoverableRegion : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "uncoverable-region"; }
};

class NoStableAlternative : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "no-stable-alternative"; }
};

}  // namespace acdc
