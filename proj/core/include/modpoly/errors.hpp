#pragma once

#include <stdexcept>
#include <string>

namespace modpoly {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, used by the CLI's error line.
  virtual const char* kind() const noexcept { return "error"; }
};

/// The requested accuracy cannot be certified under the given precision
/// budget. Callers are expected to retry with more bits.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget_exceeded"; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain_error"; }
};

class NonConvergence : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "non_convergence"; }
};

/// A proved inequality or identity failed numerically. This always means a
/// bug in the evaluation code, never a counterexample.
class ViolationFound : public Error {
 public:
  ViolationFound(std::string clause, double margin)
      : Error("violation in clause '" + clause + "' (margin " + std::to_string(margin) + ")"),
        clause_(std::move(clause)),
        margin_(margin) {}
  const char* kind() const noexcept override { return "violation_found"; }
  const std::string& clause() const noexcept { return clause_; }
  double margin() const noexcept { return margin_; }

 private:
  std::string clause_;
  double margin_;
};

/// Interpolation failed to round to integers after every retry.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precision_exhausted"; }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  const char* kind() const noexcept override { return "parse_error"; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose content is contradictory or structurally invalid.
class ConsistencyError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "consistency_error"; }
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const char* kind() const noexcept override { return "io_error"; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace modpoly
