#pragma once

#include <stdexcept>
#include <string>

namespace cohset {

/// Bad or inconsistent experiment/configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or set that does not belong to the grid it is used with.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The integrator produced a nonfinite or runaway state.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of sweeps. Carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace cohset
