#pragma once

#include <stdexcept>
#include <string>

namespace lzlmg {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Adaptive integration gave up. `time()` is where the step size collapsed
/// (or where a monitored invariant was found broken).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& msg, double t)
      : Error(msg + " (t = " + std::to_string(t) + ")"), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class EigenSolverError : public Error {
 public:
  EigenSolverError(const std::string& msg, double t)
      : Error(msg + " (t = " + std::to_string(t) + ")"), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& msg, double residual = -1.0)
      : Error(msg), residual_(residual) {}
  /// Residual of the last iterate, or -1 if no iterate was formed.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Bad campaign configuration; `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : Error("config key '" + key + "': " + msg), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace lzlmg
