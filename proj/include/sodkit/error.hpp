// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <stdexcept>
#include <string>

namespace sodkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad thresholds, empty image, l >= r, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input bytes: bad magic, truncated tensors, unparsable CSV/JSON.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a semantic rule (dangling ids, negative sizes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical post-condition failure, e.g. imaginary residue after an inverse FFT.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sodkit
