#pragma once

#include <stdexcept>
#include <string>

namespace stochsync {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed graphs, invalid parameters, inconsistent dimensions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (eigensolver, estimator, integrator).
class NumericError : public Error {
 public:
  using Error::Error;
};

// The state left the finite range during integration.
class IntegrationBlowup : public NumericError {
 public:
  IntegrationBlowup(double time, double state_norm);

  double time() const { return time_; }
  double state_norm() const { return state_norm_; }

 private:
  double time_;
  double state_norm_;
};

// The requested noise layer cannot certify synchronization.
class InfeasibleDesign : public Error {
 public:
  using Error::Error;
};

// Experiment configuration problem; `field` is the dotted key path.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& message, int line = -1);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace stochsync
