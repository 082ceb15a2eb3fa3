#pragma once

#include <stls/model.hpp>
#include <stls/prox.hpp>

#include <utility>

namespace stls {

/// Iterates of the augmented Lagrangian solvers.
struct AlmState {
  Matrix a;
  Matrix e;
  Matrix d;        ///< W1 A W2 splitting variable (weighted solver only)
  Matrix lambda1;  ///< multiplier of A_bar = A + E
  Matrix lambda2;  ///< multiplier of D = W1 A W2 (weighted solver only)
  double mu = 1.0;
  int iteration = 0;
};

struct AlmReport {
  std::vector<double> feas_residuals;      ///< ||A_bar - A - E|| / ||A_bar||
  std::vector<double> coupling_residuals;  ///< ||D - W1 A W2|| / ||A_bar||
  std::vector<double> mu_history;          ///< penalty used at each iteration
  Index final_rank = 0;
  int iterations = 0;
  bool converged = false;
};

using AlmResult = std::pair<StlsSolution, AlmReport>;

/// Inexact ALM for min ||A||_* + alpha ||W .* E||_F^2 s.t. A + E = A_bar,
/// L(E) = b. One A/E sweep per multiplier update.
AlmResult alm_nn_stls(const StlsProblem& p, double alpha,
                      const SolverConfig& cfg);

/// Inexact ALM for the weighted subproblem min ||W1 A W2||_* + alpha
/// ||W .* E||_F^2 via the splitting D = W1 A W2; the A-update is a
/// Sylvester solve.
AlmResult alm_weighted_nn_stls(const StlsProblem& p, double alpha,
                               const ReweightPair& rw,
                               const SolverConfig& cfg);

struct AlphaSearchResult {
  double alpha = 0.0;
  StlsSolution solution;
  AlmReport report;
  int alm_runs = 0;
  long total_iterations = 0;
};

/// Largest alpha whose (converged) solution has numerical rank <=
/// target_rank, found by geometric bracketing and bisection. Identity
/// weights use the plain nuclear-norm solver. `alpha_start` overrides the
/// default starting point 1 / (2 sigma_N(A_bar)). Throws (rank_infeasible)
/// when no tested alpha qualifies.
AlphaSearchResult alpha_search(const StlsProblem& p, const ReweightPair& rw,
                               const SolverConfig& cfg,
                               double alpha_start = 0.0);

/// Full reweighted nuclear-norm STLS: an alpha search per round, weights
/// refreshed from each round's solution, max_reweights + 1 rounds in total.
AlmResult reweighted_stls(const StlsProblem& p, const SolverConfig& cfg);

/// The plain nuclear-norm pipeline (a single unweighted alpha search).
AlmResult nn_stls(const StlsProblem& p, const SolverConfig& cfg);

}  // namespace stls
