#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (wrong group kind, t <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic left the 64-bit range.
class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

/// A distributional hypothesis required by an operation does not hold.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string rule, const std::string& message)
      : Error(message), rule_(std::move(rule)) {}
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

/// A memory or exploration budget was exhausted before the computation finished.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& message, std::size_t budget, double progress)
      : Error(message), budget_(budget), progress_(progress) {}
  std::size_t budget() const noexcept { return budget_; }
  /// Radius reached (balls) or best lower bound on the answer (searches).
  double progress() const noexcept { return progress_; }

 private:
  std::size_t budget_;
  double progress_;
};

/// A statistical procedure could not produce its estimate (e.g. empty fit range).
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpp
