#include <stls/tls.hpp>

#include <stls/error.hpp>
#include <stls/linalg.hpp>
#include <stls/prox.hpp>

#include <cmath>
#include <sstream>

namespace stls {

namespace {

void fill_nullspace(StlsSolution& sol, const SvdFactors& f, double rank_tol) {
  sol.null_vec = f.v.col(f.v.cols() - 1);
  const double last = sol.null_vec(sol.null_vec.size() - 1);
  if (std::abs(last) > 1e-8) sol.beta = extract_beta(sol.null_vec);
  const Vector s_hat = singular_values(sol.a_hat);
  sol.diagnostics.numerical_rank = numerical_rank(s_hat, rank_tol);
}

}  // namespace

StlsSolution plain_tls(const Matrix& a_bar, Index target_rank) {
  const Index n = a_bar.cols();
  if (a_bar.rows() < n)
    throw Error(ErrorCategory::invalid_input, "plain_tls: M >= N required");
  if (target_rank < 0 || target_rank > n - 1)
    throw Error(ErrorCategory::invalid_input,
                "plain_tls: target_rank must lie in [0, N-1]");
  const SvdFactors f = svd(a_bar);
  StlsSolution sol;
  sol.a_hat = f.u.leftCols(target_rank) * f.s.head(target_rank).asDiagonal() *
              f.v.leftCols(target_rank).transpose();
  sol.e_hat = a_bar - sol.a_hat;
  fill_nullspace(sol, f, SolverConfig{}.rank_tol);
  sol.diagnostics.feas_residual = 0.0;
  return sol;
}

StlsSolution plain_tls(const StlsProblem& p) {
  validate_problem(p);
  if (!p.structure.is_unconstrained())
    throw Error(ErrorCategory::invalid_input,
                "plain_tls ignores error structure; use nn_stls or "
                "reweighted_stls for '" + p.structure.name() + "' problems");
  return plain_tls(p.a_bar, p.target_rank);
}

Vector extract_beta(const Vector& null_vec) {
  const Index n = null_vec.size();
  if (n < 2)
    throw Error(ErrorCategory::invalid_input, "extract_beta: length >= 2 required");
  const double last = null_vec(n - 1);
  if (!(std::abs(last) > 1e-8))
    throw Error(ErrorCategory::nongeneric,
                "nongeneric TLS: last nullspace entry vanishes, no finite beta");
  return null_vec.head(n - 1) / last;
}

StlsSolution logdet_tls(const Matrix& a_bar) {
  if (a_bar.rows() < a_bar.cols())
    throw Error(ErrorCategory::invalid_input, "logdet_tls: M >= N required");
  const SvdFactors f = svd(a_bar);
  const double smallest = f.s(f.s.size() - 1);
  if (!(smallest > 0.0))
    throw Error(ErrorCategory::degenerate, "logdet_tls: sigma_N = 0");

  const double alpha = 0.25 * smallest * smallest;
  Vector mapped(f.s.size());
  Index annihilated = 0;
  for (Index i = 0; i < f.s.size(); ++i) {
    mapped(i) = log_threshold_scalar(f.s(i), alpha, 0.0);
    if (mapped(i) == 0.0) ++annihilated;
  }

  StlsSolution sol;
  sol.a_hat = f.u * mapped.asDiagonal() * f.v.transpose();
  sol.e_hat = a_bar - sol.a_hat;
  sol.alpha = alpha;
  fill_nullspace(sol, f, SolverConfig{}.rank_tol);
  sol.diagnostics.annihilated = annihilated;
  if (annihilated > 1) {
    std::ostringstream os;
    os << annihilated << " singular values tied at sigma_N were annihilated";
    sol.diagnostics.notes.push_back(os.str());
  }
  if (annihilated == f.s.size())
    sol.diagnostics.notes.push_back("degenerate: output has rank 0");
  return sol;
}

}  // namespace stls
