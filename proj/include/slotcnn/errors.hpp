// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Error hierarchy for the slot-vector CNN engine. Every failure thrown by the
// library derives from slotcnn::Error and carries a coarse category that the
// command-line driver maps onto its exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace slotcnn {

/// Coarse failure categories. The numeric value doubles as the CLI exit code:
/// usage errors exit 1, model/data errors exit 2, internal invariant
/// violations exit 3.
enum class ErrorCategory : int {
  usage = 1,
  data = 2,
  internal = 3,
};

/// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

/// A rotation amount with |t| >= slot count was requested.
class InvalidRotationError : public Error {
 public:
  explicit InvalidRotationError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

/// A multiplication was attempted on a value whose remaining multiplicative
/// depth is exhausted. After a model passes its build-time depth validation
/// this can only happen through an engine bug, so it is an internal error.
class DepthExhaustedError : public Error {
 public:
  explicit DepthExhaustedError(const std::string& message)
      : Error(ErrorCategory::internal, message) {}
};

/// Operand shapes or slot counts are inconsistent (including non-divisible
/// stride geometry and kernels larger than their input).
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

/// A packed layout does not fit in the available slots.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

/// A model description or its weight files are malformed or inconsistent.
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

/// An internal invariant failed; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message)
      : Error(ErrorCategory::internal, message) {}
};

}  // namespace slotcnn
