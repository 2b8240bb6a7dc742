#pragma once

#include <stdexcept>
#include <string>

namespace meshmdp {

// Precondition violated by the caller (bad dimension, empty set, ...).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A point lies outside the domain on which a density is defined.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Non-finite intermediate results or non-convergent series.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A deterministic approximation could not certify the requested tolerance.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace meshmdp
