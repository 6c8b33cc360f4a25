// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dbsde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent tensor shapes or dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, unknown names, violated preconditions on inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity was produced somewhere it must not be.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures and corrupt or incompatible files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dbsde
