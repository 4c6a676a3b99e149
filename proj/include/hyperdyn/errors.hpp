#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperdyn {

/// Point off the coordinate chart, or stencil leaving the half-plane.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exponent too large to represent (closed forms blow up as y -> 0).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Parameters for which an operation has no answer (gamma = 0, short fits, ...).
class DegenerateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad user-facing configuration: unknown keys, non-finite values, dt above
/// the stability bound.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(std::size_t step, double time)
      : std::runtime_error("non-finite value produced at step " + std::to_string(step)),
        step_(step),
        time_(time) {}

  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

}  // namespace hyperdyn
