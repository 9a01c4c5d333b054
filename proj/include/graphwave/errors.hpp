#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphwave {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph configuration; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A standing assumption on the graph or operator does not hold
/// (connectivity, external edge, negative ground energy).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid numerical setup (mesh step too coarse, bad option values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a mathematical operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested mass exceeds the feasibility bound c <= r / lambda0.
class FeasibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative solver did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, long iterations,
              std::vector<double> history = {})
      : Error(what), residual_(residual), iterations_(iterations), history_(std::move(history)) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }
  /// Residual after each iteration, when the solver records one.
  const std::vector<double>& history() const { return history_; }

 private:
  double residual_;
  long iterations_;
  std::vector<double> history_;
};

/// A gradient-flow iterate left the ball B(r).
class BallExitError : public Error {
 public:
  BallExitError(const std::string& what, long iteration, double g_norm_sq)
      : Error(what), iteration_(iteration), g_norm_sq_(g_norm_sq) {}
  long iteration() const { return iteration_; }
  double g_norm_sq() const { return g_norm_sq_; }

 private:
  long iteration_;
  double g_norm_sq_;
};

/// Sup norm of an evolving solution exceeded the overflow guard.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

}  // namespace graphwave
