#include <stls/error.hpp>

namespace stls {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::invalid_input: return "invalid-input";
    case ErrorCategory::degenerate: return "degenerate";
    case ErrorCategory::rank_infeasible: return "rank-infeasible";
    case ErrorCategory::divergence: return "divergence";
    case ErrorCategory::singular_system: return "singular-system";
    case ErrorCategory::nongeneric: return "nongeneric";
    case ErrorCategory::non_identifiable: return "non-identifiable";
    case ErrorCategory::sign_indefinite: return "sign-indefinite";
    case ErrorCategory::io: return "io";
    case ErrorCategory::parse: return "parse";
  }
  return "unknown";
}

namespace {
std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid problem";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i == 0 ? ": " : "; ");
    out += v[i];
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(ErrorCategory::invalid_input, join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace stls
