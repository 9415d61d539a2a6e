#pragma once

#include <stdexcept>
#include <string>

namespace mirrax {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed documents, out-of-range indices.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Roller axis parallel to the wheel axis (cos(alpha) == 0).
class SingularWheel : public Error {
 public:
  using Error::Error;
};

// Reduced mass matrix too ill-conditioned to invert.
class NearSingularDynamics : public Error {
 public:
  using Error::Error;
};

class IntegrationDiverged : public Error {
 public:
  IntegrationDiverged(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mirrax
