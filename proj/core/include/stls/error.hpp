#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stls {

enum class ErrorCategory {
  invalid_input,
  degenerate,
  rank_infeasible,
  divergence,
  singular_system,
  nongeneric,
  non_identifiable,
  sign_indefinite,
  io,
  parse,
};

/// Stable, machine-readable name of a category ("rank-infeasible", ...).
std::string_view category_name(ErrorCategory c) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Raised by validate_problem; carries every violated invariant, not just
/// the first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

/// Raised when a linear system that should be solved is (numerically)
/// singular. `smallest_pivot` is the magnitude that triggered the failure.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double smallest_pivot)
      : Error(ErrorCategory::singular_system, what),
        smallest_pivot_(smallest_pivot) {}

  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

}  // namespace stls
