#pragma once

#include <stdexcept>
#include <string>

namespace sheafmach {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A window, time or index lies outside the section it addresses.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Two sections do not agree on their shared endpoint and cannot be glued.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

/// Behavior types (or section shapes) do not match.
class TypeError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain a machine accepts (e.g. log of a value below the floor).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during integration; carries the time at which the state blew up.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double blow_up_time)
      : Error(what), blow_up_time_(blow_up_time) {}

  double blow_up_time() const noexcept { return blow_up_time_; }

 private:
  double blow_up_time_;
};

}  // namespace sheafmach
