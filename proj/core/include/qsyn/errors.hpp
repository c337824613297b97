#pragma once

#include <stdexcept>
#include <string>

namespace qsyn {

// Root of the error taxonomy. Every failure raised by the library derives from
// this type so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Raised by stable_subspace when the spectrum touches the imaginary axis.
class ImaginaryAxisEigenvalue : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NoStabilizingSolution : public Error {
 public:
  using Error::Error;
};

class CouplingFailure : public Error {
 public:
  CouplingFailure(const std::string& what, double radius)
      : Error(what), radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

class NotRealizable : public Error {
 public:
  NotRealizable(const std::string& what, double value)
      : Error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

class StructureError : public Error {
 public:
  using Error::Error;
};

class UnstableLoop : public Error {
 public:
  using Error::Error;
};

class CertificateUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace qsyn
