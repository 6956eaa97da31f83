#pragma once

#include <stdexcept>
#include <string>

namespace repfreq {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution or model parameters, or an argument outside its domain.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Unusable input data: empty corpus, malformed JSON, inconsistent files.
class InputError : public Error {
public:
  using Error::Error;
};

/// An iterative procedure failed to converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Numerical failure: quadrature did not reach tolerance, simulation unstable.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace repfreq
