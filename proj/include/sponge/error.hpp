#pragma once

#include <stdexcept>
#include <string>

namespace sponge {

/// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The max-slack value of an ordering's Lyapunov chain fell inside the
/// borderline band, so membership cannot be decided in double precision.
class BorderlineOrdering : public Error {
 public:
  BorderlineOrdering(const std::string& ordering, double slack)
      : Error("borderline ordering " + ordering + " (slack " + std::to_string(slack) + ")"),
        slack_(slack) {}
  double slack() const noexcept { return slack_; }

 private:
  double slack_;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class RootOutOfUnitInterval : public Error {
 public:
  using Error::Error;
};

class SeparationNotVerified : public Error {
 public:
  using Error::Error;
};

class InvalidEpsilon : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Extremal-witness construction failures.
class NoStrictLetter : public Error {
 public:
  using Error::Error;
};

class RangeEmpty : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sponge
