// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tron {

/// Base of every error raised by the toolkit. The CLI maps the three
/// families below onto process exit codes (2, 3, 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: unknown keys, variant mismatch, bad grid steps.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable data: shape mismatch, unfillable gaps, corrupt files.
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// Non-finite loss or gradient during optimisation.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace tron
