#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airyline {

enum class ErrorCategory { domain, accuracy, config, numeric, parse, io, infeasible };

inline std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::accuracy: return "accuracy";
    case ErrorCategory::config: return "config";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::io: return "io";
    case ErrorCategory::infeasible: return "infeasible";
  }
  return "unknown";
}

/// Base for every error thrown by the library. The category is what the CLI
/// reports as its machine-readable failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCategory::parse, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorCategory::infeasible, what) {}
};

/// Raised when an iterative or adaptive scheme exhausts its budget. Carries the
/// best value reached and its error estimate so callers can still inspect it.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_real, double best_imag, double estimate)
      : Error(ErrorCategory::accuracy, what),
        best_real_(best_real),
        best_imag_(best_imag),
        estimate_(estimate) {}
  double best_real() const noexcept { return best_real_; }
  double best_imag() const noexcept { return best_imag_; }
  double error_estimate() const noexcept { return estimate_; }

 private:
  double best_real_;
  double best_imag_;
  double estimate_;
};

}  // namespace airyline
