#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dburgers {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition (size mismatch, bad grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A monitored norm exceeded the blow-up threshold, or samples became non-finite.
class BlowUp : public Error {
 public:
  BlowUp(double time, double value, const std::string& what)
      : Error(what), time_(time), value_(value) {}
  double time() const { return time_; }
  double value() const { return value_; }

 private:
  double time_;
  double value_;
};

/// psi dropped below the positivity floor, leaving the domain of log.
class PositivityLost : public Error {
 public:
  PositivityLost(double min_value, const std::string& what) : Error(what), min_value_(min_value) {}
  double min_value() const { return min_value_; }

 private:
  double min_value_;
};

/// A fixed-point iteration failed to reach its tolerance.
class NoConvergence : public Error {
 public:
  NoConvergence(std::vector<double> residuals, const std::string& what)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace dburgers
