#pragma once

#include <stdexcept>
#include <string>

namespace csbm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or estimator parameters (alpha/beta outside (0,1), lambda <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input is valid but the estimator cannot use it: a spectrum or graph statistic makes a
/// log argument non-positive, or a normalization vanishes. Callers usually fall back.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace csbm
