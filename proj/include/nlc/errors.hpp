#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

/// Bad caller input: out-of-range parameters, malformed bipartitions, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariance matrix that violates the uncertainty relation or has a
/// non-positive determinant.
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration produced non-finite values or lost symplecticity. Carries the
/// propagation coordinate reached when the failure was detected.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double zeta)
      : std::runtime_error(what + " (zeta = " + std::to_string(zeta) + ")"), zeta_(zeta) {}

  double zeta() const noexcept { return zeta_; }

 private:
  double zeta_;
};

/// Configuration file problems. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace nlc
