#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frbl {

// Base of every error thrown by the library. The CLI maps all of these to
// exit code 2 except PreconditionViolated, which is a property failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A datum candidate failed validation; carries every violated condition.
class InvalidDatum : public InvalidInput {
 public:
  explicit InvalidDatum(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class NotPositiveSemidefinite : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotPositiveDefinite : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SingularTransform : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Numerical setup that cannot deliver the advertised accuracy (kernel much
// wider than the grid, total underflow of an evolved value).
class AccuracyError : public Error {
 public:
  using Error::Error;
};

// A stated precondition of a check does not hold for the supplied data, e.g.
// the pointwise relation is already violated at t = 0.
class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(std::string what, std::vector<std::string> details = {})
      : Error(std::move(what)), details_(std::move(details)) {}
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::vector<std::string> details_;
};

}  // namespace frbl
