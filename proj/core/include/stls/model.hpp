#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace stls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Error structure: the affine set {E : tr(L_i^T E) = b_i} the error matrix
// must lie in.
// ---------------------------------------------------------------------------

/// No constraint on E.
struct Unconstrained {};

/// One entry of E pinned to a known value (normally 0: an exact measurement).
struct FixedEntry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

struct FixedMask {
  std::vector<FixedEntry> entries;

  /// Every entry where `mask` is nonzero is fixed to 0.
  static FixedMask from_indicator(const Matrix& mask);
};

/// E constant along each diagonal.
struct Toeplitz {};

/// tr(L^T E) = b.
struct LinearConstraint {
  Matrix l;
  double b = 0.0;
};

struct GeneralLinear {
  std::vector<LinearConstraint> constraints;
};

class ErrorStructure {
 public:
  using Kind = std::variant<Unconstrained, FixedMask, Toeplitz, GeneralLinear>;

  ErrorStructure() = default;
  template <typename T>
    requires std::is_constructible_v<Kind, T&&>
  ErrorStructure(T&& kind) : kind_(std::forward<T>(kind)) {}  // NOLINT(implicit)

  const Kind& kind() const noexcept { return kind_; }

  bool is_unconstrained() const noexcept {
    return std::holds_alternative<Unconstrained>(kind_);
  }

  /// "none", "mask", "toeplitz" or "linear".
  std::string name() const;

 private:
  Kind kind_ = Unconstrained{};
};

// ---------------------------------------------------------------------------
// Solver configuration.
// ---------------------------------------------------------------------------

struct SolverConfig {
  /// Penalty growth a in mu_k = mu_init * a^k.
  double mu_growth = 1.05;
  double mu_init = 1.0;
  /// Reweighting regularizer, relative to the largest singular value of the
  /// current weighted iterate.
  double delta = 1e-4;
  int max_reweights = 3;
  int alm_max_iters = 500;
  /// Relative feasibility tolerance, measured against ||A_bar||_F.
  double feas_tol = 1e-8;
  /// Relative singular-value cutoff used to count rank.
  double rank_tol = 1e-6;

  /// Multiplicative step used to bracket alpha.
  double bracket_factor = 2.0;
  int max_bracket_steps = 40;
  int bisection_iters = 30;
  /// Bisection stops early once hi/lo - 1 falls below this.
  double alpha_rel_tol = 1e-3;
};

// ---------------------------------------------------------------------------
// Problem and solution records.
// ---------------------------------------------------------------------------

struct StlsProblem {
  Matrix a_bar;
  ErrorStructure structure;
  /// Element-wise weights W of ||W .* E||_F; zero means unpenalized.
  Matrix weights;
  /// Upper bound on rank(A); the classical problem uses N - 1.
  Index target_rank = 0;

  /// Unconstrained problem with unit weights and target rank N - 1.
  static StlsProblem make(Matrix a_bar, ErrorStructure structure = {});

  Index rows() const noexcept { return a_bar.rows(); }
  Index cols() const noexcept { return a_bar.cols(); }
};

struct SolveDiagnostics {
  /// Feasibility residual ||A_bar - A - E||_F / ||A_bar||_F per ALM
  /// iteration of the run that produced the solution.
  std::vector<double> residual_history;
  /// Iterations of the ALM run that produced the solution.
  int iterations = 0;
  /// ALM iterations summed over every run (alpha search, reweighting).
  long total_iterations = 0;
  int alm_runs = 0;
  Index numerical_rank = 0;
  double feas_residual = 0.0;
  bool converged = true;
  /// Relative error after each reweighting round (reweighted solver only).
  std::vector<double> round_relative_errors;
  /// Singular values zeroed by the log-thresholding baseline.
  Index annihilated = 0;
  std::vector<std::string> notes;
};

struct StlsSolution {
  Matrix a_hat;
  Matrix e_hat;
  /// Unit right singular vector of a_hat for its smallest singular value.
  Vector null_vec;
  std::optional<Vector> beta;
  double alpha = 0.0;
  SolveDiagnostics diagnostics;
};

/// Returns `p` unchanged when every invariant holds; throws ValidationError
/// listing every violation otherwise.
const StlsProblem& validate_problem(const StlsProblem& p);

/// ||A_bar - a_hat||_F / sigma_N(A_bar). Throws (category degenerate) when
/// A_bar is already rank-deficient.
double relative_error(const StlsProblem& p, const StlsSolution& sol);
double relative_error(const Matrix& a_bar, const Matrix& a_hat);

}  // namespace stls
