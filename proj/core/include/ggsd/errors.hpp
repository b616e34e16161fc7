#pragma once

#include <stdexcept>
#include <string>

namespace ggsd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A root finder was handed an interval without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A spending function produced a negative alpha increment.
class SpendingError : public Error {
 public:
  using Error::Error;
};

/// An operation was applied to a hypothesis graph in an illegal state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Input data is missing a required slot or is inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

/// An analysis trigger cannot be reached with the available events.
class SchedulingError : public Error {
 public:
  SchedulingError(const std::string& what, long max_achievable)
      : Error(what), max_achievable_(max_achievable) {}
  long max_achievable() const noexcept { return max_achievable_; }

 private:
  long max_achievable_;
};

/// A design or run configuration violates an invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ggsd
