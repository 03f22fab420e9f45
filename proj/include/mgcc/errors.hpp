#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mgcc {

/// Argument outside the mathematical domain of an operation (negative rate,
/// car count out of range, log of a non-positive value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an interface contract (mismatched lengths, missing input).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem too large for the dense/banded exact solve.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Fixed-point iteration ran out of iterations without converging or
/// settling into a 2-cycle. Carries the iterates for diagnosis.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace mgcc
