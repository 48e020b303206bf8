#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sck {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad problem data (wrong sizes, non-positive costs, invalid weights, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The diffusion or the curvature of a cost degenerates.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine finished but could not reach the requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// No sign change of a residual was found while bracketing.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// The closed-form machinery does not cover the requested case.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without converging.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// A free boundary could not be located in a numerical solution.
class BoundaryNotFound : public Error {
 public:
  using Error::Error;
};

/// A run configuration violates its schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sck
