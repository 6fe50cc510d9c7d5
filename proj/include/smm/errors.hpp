#pragma once

#include <stdexcept>
#include <string>

namespace smm {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// omega_s == 0: the dressed basis is undefined.
class DegenerateDressedBasis : public Error {
 public:
  using Error::Error;
};

// Matrix is not a valid density matrix within tolerance.
class InvalidState : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double tolerance)
      : Error(what), estimate_(estimate), tolerance_(tolerance) {}
  double estimate() const { return estimate_; }
  double tolerance() const { return tolerance_; }

 private:
  double estimate_;
  double tolerance_;
};

// Raised when the ODE integration can no longer be trusted.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace smm
