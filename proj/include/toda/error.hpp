#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace toda {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain, grid request or symmetry mismatch.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad argument outside the geometric setting (parameter ranges, p < 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The grid cannot resolve the requested concentration scale.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double min_admissible_lambda = 0.0)
      : Error(what), min_admissible_lambda_(min_admissible_lambda) {}
  double min_admissible_lambda() const { return min_admissible_lambda_; }

 private:
  double min_admissible_lambda_;
};

/// Linear or nonlinear solver failure. Carries the residual history.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }
  double final_residual() const { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

/// Overflow or non-finite values in exponential nonlinearities.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A number in %.6g form for error messages.
inline std::string num_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace toda
