#pragma once

#include <stdexcept>
#include <string>

namespace dataprog {

// User-facing failures (bad input, bad configuration, policy violations).
// The CLI maps these to exit code 1; anything else is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PolicyError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

// Raised when a write is attempted against a stale project version.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& what, long current_version)
      : Error(what), current_version_(current_version) {}
  long current_version() const { return current_version_; }

 private:
  long current_version_;
};

}  // namespace dataprog
