#pragma once

#include <stdexcept>
#include <string>

namespace lbd {

/// Invalid inputs: bad shapes, negative rates, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Integration produced a non-finite state. Carries the failure time.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& msg, double t)
      : std::runtime_error(msg + " (t=" + std::to_string(t) + ")"), time(t) {}
  double time;
};

/// Step size underflowed; the problem is stiffer than the solver handles.
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(const std::string& msg, double t)
      : std::runtime_error(msg + " (t=" + std::to_string(t) + ")"), time(t) {}
  double time;
};

/// Controller synthesis failed (Riccati non-convergence, uncontrollable pair).
class DesignError : public std::runtime_error {
 public:
  explicit DesignError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model fitting failed (under-determined or rank-deficient regression).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Robot entered a configuration where the inertia matrix is numerically singular.
class SingularConfigurationError : public std::runtime_error {
 public:
  explicit SingularConfigurationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A target process that cannot be scored (uncontrolled trajectory already matches it).
class DegenerateTargetError : public std::runtime_error {
 public:
  explicit DegenerateTargetError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File / OS level failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lbd
