#include <stls/alm.hpp>

#include <stls/error.hpp>
#include <stls/linalg.hpp>
#include <stls/projection.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace stls {

namespace {

constexpr int kConvergedStreak = 3;
constexpr int kDivergenceStreak = 50;
constexpr double kDivergenceFactor = 10.0;

void check_config(const SolverConfig& cfg) {
  std::vector<std::string> v;
  if (!(cfg.mu_growth > 1.0)) v.push_back("mu_growth must be > 1");
  if (!(cfg.mu_init > 0.0)) v.push_back("mu_init must be > 0");
  if (!(cfg.delta > 0.0)) v.push_back("delta must be > 0");
  if (!(cfg.feas_tol > 0.0)) v.push_back("feas_tol must be > 0");
  if (!(cfg.rank_tol > 0.0)) v.push_back("rank_tol must be > 0");
  if (!(cfg.bracket_factor > 1.0)) v.push_back("bracket_factor must be > 1");
  if (!(cfg.alpha_rel_tol > 0.0)) v.push_back("alpha_rel_tol must be > 0");
  if (cfg.alm_max_iters < 1) v.push_back("alm_max_iters must be >= 1");
  if (cfg.max_reweights < 0) v.push_back("max_reweights must be >= 0");
  if (cfg.bisection_iters < 0) v.push_back("bisection_iters must be >= 0");
  if (cfg.max_bracket_steps < 0) v.push_back("max_bracket_steps must be >= 0");
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Convergence and divergence bookkeeping shared by both ALM loops.
class IterationMonitor {
 public:
  IterationMonitor(const SolverConfig& cfg, AlmReport& report)
      : cfg_(cfg), report_(report) {}

  /// Records one iteration; returns true once converged.
  bool record(double feas, double coupling, double step, double mu) {
    if (!std::isfinite(feas) || !std::isfinite(coupling) || !std::isfinite(step))
      throw Error(ErrorCategory::divergence, "ALM produced a non-finite iterate");
    report_.feas_residuals.push_back(feas);
    report_.coupling_residuals.push_back(coupling);
    report_.mu_history.push_back(mu);
    report_.iterations += 1;

    const double worst = std::max(feas, coupling);
    if (report_.iterations == 1) initial_ = std::max(worst, cfg_.feas_tol);
    growing_ = worst > kDivergenceFactor * initial_ ? growing_ + 1 : 0;
    if (growing_ >= kDivergenceStreak) {
      std::ostringstream os;
      os << "ALM diverged: residual " << worst << " stayed above "
         << kDivergenceFactor << "x its initial value for "
         << kDivergenceStreak << " iterations";
      throw Error(ErrorCategory::divergence, os.str());
    }
    const bool small = worst <= cfg_.feas_tol && step <= cfg_.feas_tol;
    streak_ = small ? streak_ + 1 : 0;
    report_.converged = streak_ >= kConvergedStreak;
    return report_.converged;
  }

 private:
  const SolverConfig& cfg_;
  AlmReport& report_;
  double initial_ = 0.0;
  int growing_ = 0;
  int streak_ = 0;
};

double scale_of(const Matrix& a_bar) {
  const double n = a_bar.norm();
  return n > 0.0 ? n : 1.0;
}

// The returned pair satisfies A + E = A_bar exactly: unconstrained
// iterates are truncated to their numerical rank and E absorbs the rest;
// structured ones keep the projected E and set A = A_bar - E.
StlsSolution assemble(const StlsProblem& p, const AlmState& st, double alpha,
                      AlmReport& report, const SolverConfig& cfg) {
  StlsSolution sol;
  sol.alpha = alpha;
  SvdFactors f;
  if (p.structure.is_unconstrained()) {
    f = svd(st.a);
    const Index r = numerical_rank(f.s, cfg.rank_tol);
    f.s.tail(f.s.size() - r).setZero();
    sol.a_hat = f.reconstruct();
    sol.e_hat = p.a_bar - sol.a_hat;
  } else {
    sol.e_hat = st.e;
    sol.a_hat = p.a_bar - st.e;
    f = svd(sol.a_hat);
  }
  sol.null_vec = f.v.col(f.v.cols() - 1);
  if (std::abs(sol.null_vec(sol.null_vec.size() - 1)) > 1e-8)
    sol.beta = sol.null_vec.head(sol.null_vec.size() - 1) /
               sol.null_vec(sol.null_vec.size() - 1);
  report.final_rank = numerical_rank(f.s, cfg.rank_tol);

  auto& d = sol.diagnostics;
  d.residual_history = report.feas_residuals;
  d.iterations = report.iterations;
  d.total_iterations = report.iterations;
  d.alm_runs = 1;
  d.numerical_rank = report.final_rank;
  d.feas_residual = (p.a_bar - st.a - st.e).norm() / scale_of(p.a_bar);
  d.converged = report.converged;
  return sol;
}

// E-update: exact minimizer of the augmented Lagrangian over E (weighted
// Frobenius term), followed by projection onto the structure.
Matrix update_error(const StlsProblem& p, const StructureProjector& proj,
                    const Matrix& weights_sq, const Matrix& lambda,
                    const Matrix& a, double alpha, double mu) {
  const Matrix numer = lambda + mu * (p.a_bar - a);
  const Matrix denom = (2.0 * alpha * weights_sq).array() + mu;
  return proj.apply(numer.cwiseQuotient(denom));
}

// 1 / sqrt(lambda_max lambda_min) of a symmetric positive definite weight.
double centring_factor(const Matrix& w) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(w, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  if (!(lo > 0.0) || !std::isfinite(hi))
    throw Error(ErrorCategory::invalid_input,
                "alm_weighted_nn_stls: weights must be positive definite");
  return 1.0 / std::sqrt(lo * hi);
}

}  // namespace

AlmResult alm_nn_stls(const StlsProblem& p, double alpha,
                      const SolverConfig& cfg) {
  validate_problem(p);
  check_config(cfg);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCategory::invalid_input, "alm_nn_stls: alpha must be > 0");

  const StructureProjector proj(p.structure, p.rows(), p.cols());
  const Matrix weights_sq = p.weights.cwiseAbs2();
  const double scale = scale_of(p.a_bar);

  AlmState st;
  st.a = Matrix::Zero(p.rows(), p.cols());
  st.e = proj.apply(Matrix::Zero(p.rows(), p.cols()));
  st.lambda1 = Matrix::Zero(p.rows(), p.cols());
  st.mu = cfg.mu_init;

  AlmReport report;
  IterationMonitor monitor(cfg, report);
  for (int k = 0; k < cfg.alm_max_iters; ++k) {
    const Matrix a_prev = st.a;
    st.a = svt(p.a_bar - st.e + st.lambda1 / st.mu, 1.0 / st.mu);
    st.e = update_error(p, proj, weights_sq, st.lambda1, st.a, alpha, st.mu);
    const Matrix residual = p.a_bar - st.a - st.e;
    st.lambda1 += st.mu * residual;
    st.iteration = k + 1;

    const bool done = monitor.record(residual.norm() / scale, 0.0,
                                     (st.a - a_prev).norm() / scale, st.mu);
    st.mu *= cfg.mu_growth;
    if (done) break;
  }
  StlsSolution sol = assemble(p, st, alpha, report, cfg);
  return {std::move(sol), std::move(report)};
}

AlmResult alm_weighted_nn_stls(const StlsProblem& p, double alpha,
                               const ReweightPair& rw,
                               const SolverConfig& cfg) {
  validate_problem(p);
  check_config(cfg);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCategory::invalid_input,
                "alm_weighted_nn_stls: alpha must be > 0");
  if (rw.w1.rows() != p.rows() || rw.w1.cols() != p.rows() ||
      rw.w2.rows() != p.cols() || rw.w2.cols() != p.cols())
    throw Error(ErrorCategory::invalid_input,
                "alm_weighted_nn_stls: weight dimensions do not match");

  const StructureProjector proj(p.structure, p.rows(), p.cols());
  const Matrix weights_sq = p.weights.cwiseAbs2();
  const double scale = scale_of(p.a_bar);
  // ||c1 W1 A W2 c2||_* + c1 c2 alpha ||W .* E||^2 has the same minimizer;
  // centring both spectra on 1 keeps the two constraints on one scale.
  const double c1 = centring_factor(rw.w1);
  const double c2 = centring_factor(rw.w2);
  const Matrix w1 = c1 * rw.w1;
  const Matrix w2 = c2 * rw.w2;
  const double scaled_alpha = c1 * c2 * alpha;
  // A + W1^2 A W2^2 = C: coefficients are fixed for the whole run
  const SylvesterSolver sylvester(w1 * w1, w2 * w2);

  AlmState st;
  st.a = Matrix::Zero(p.rows(), p.cols());
  st.e = proj.apply(Matrix::Zero(p.rows(), p.cols()));
  st.d = Matrix::Zero(p.rows(), p.cols());
  st.lambda1 = Matrix::Zero(p.rows(), p.cols());
  st.lambda2 = Matrix::Zero(p.rows(), p.cols());
  st.mu = cfg.mu_init;

  AlmReport report;
  IterationMonitor monitor(cfg, report);
  Matrix weighted_a = w1 * st.a * w2;
  for (int k = 0; k < cfg.alm_max_iters; ++k) {
    const Matrix a_prev = st.a;
    st.d = svt(weighted_a - st.lambda2 / st.mu, 1.0 / st.mu);
    st.e = update_error(p, proj, weights_sq, st.lambda1, st.a, scaled_alpha, st.mu);
    const Matrix rhs = (st.lambda1 + w1 * st.lambda2 * w2) / st.mu +
                       (p.a_bar - st.e) + w1 * st.d * w2;
    st.a = sylvester.solve(rhs);
    weighted_a = w1 * st.a * w2;

    const Matrix feas = p.a_bar - st.a - st.e;
    const Matrix coupling = st.d - weighted_a;
    st.lambda1 += st.mu * feas;
    st.lambda2 += st.mu * coupling;
    st.iteration = k + 1;

    const bool done =
        monitor.record(feas.norm() / scale, coupling.norm() / scale,
                       (st.a - a_prev).norm() / scale, st.mu);
    st.mu *= cfg.mu_growth;
    if (done) break;
  }
  StlsSolution sol = assemble(p, st, alpha, report, cfg);
  return {std::move(sol), std::move(report)};
}

namespace {

struct Trial {
  bool feasible = false;
  AlmResult result;
};

class AlphaProbe {
 public:
  AlphaProbe(const StlsProblem& p, const ReweightPair& rw,
             const SolverConfig& cfg)
      : p_(p), rw_(rw), cfg_(cfg), plain_(rw.is_identity()) {}

  Trial run(double alpha) {
    Trial t;
    try {
      t.result = plain_ ? alm_nn_stls(p_, alpha, cfg_)
                        : alm_weighted_nn_stls(p_, alpha, rw_, cfg_);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::divergence) throw;
      ++runs;
      return t;  // a diverged run proves nothing about this alpha
    }
    ++runs;
    iterations += t.result.second.iterations;
    t.feasible = t.result.second.converged &&
                 t.result.second.final_rank <= p_.target_rank;
    return t;
  }

  int runs = 0;
  long iterations = 0;

 private:
  const StlsProblem& p_;
  const ReweightPair& rw_;
  const SolverConfig& cfg_;
  bool plain_;
};

AlphaSearchResult finish(double alpha, Trial&& best, const AlphaProbe& probe) {
  AlphaSearchResult out;
  out.alpha = alpha;
  out.solution = std::move(best.result.first);
  out.report = std::move(best.result.second);
  out.alm_runs = probe.runs;
  out.total_iterations = probe.iterations;
  out.solution.diagnostics.alm_runs = probe.runs;
  out.solution.diagnostics.total_iterations = probe.iterations;
  return out;
}

// Every entry of E is pinned: A = A_bar - E is determined, no search needed.
AlphaSearchResult fully_fixed(const StlsProblem& p, const SolverConfig& cfg) {
  const StructureProjector proj(p.structure, p.rows(), p.cols());
  AlmState st;
  st.e = proj.apply(Matrix::Zero(p.rows(), p.cols()));
  st.a = p.a_bar - st.e;
  AlmReport report;
  report.converged = true;
  StlsSolution sol = assemble(p, st, std::numeric_limits<double>::infinity(),
                              report, cfg);
  if (report.final_rank > p.target_rank)
    throw Error(ErrorCategory::rank_infeasible,
                "rank-infeasible: the structure fixes every error entry and "
                "A_bar - E has rank above the target");
  AlphaSearchResult out;
  out.alpha = sol.alpha;
  out.solution = std::move(sol);
  out.report = std::move(report);
  return out;
}

}  // namespace

AlphaSearchResult alpha_search(const StlsProblem& p, const ReweightPair& rw,
                               const SolverConfig& cfg, double alpha_start) {
  validate_problem(p);
  check_config(cfg);
  if (StructureProjector(p.structure, p.rows(), p.cols()).fixes_everything())
    return fully_fixed(p, cfg);

  double start = alpha_start;
  if (!(start > 0.0) || !std::isfinite(start)) {
    const Vector s = singular_values(p.a_bar);
    const double floor = cfg.rank_tol * s(0);
    const double smallest = std::max(s(s.size() - 1), floor);
    if (!(smallest > 0.0))
      throw Error(ErrorCategory::degenerate, "alpha_search: A_bar is zero");
    start = 1.0 / (2.0 * smallest);
  }

  AlphaProbe probe(p, rw, cfg);
  const double factor = cfg.bracket_factor;

  Trial best;
  double lo = 0.0;
  double hi = 0.0;
  Trial first = probe.run(start);
  if (first.feasible) {
    lo = start;
    best = std::move(first);
    double alpha = start;
    for (int i = 0; i < cfg.max_bracket_steps; ++i) {
      alpha *= factor;
      Trial t = probe.run(alpha);
      if (!t.feasible) {
        hi = alpha;
        break;
      }
      lo = alpha;
      best = std::move(t);
    }
    if (hi == 0.0) {
      // feasible all the way up: A_bar needs (almost) no correction
      best.result.first.diagnostics.notes.push_back(
          "every bracketed alpha was rank-feasible");
      return finish(lo, std::move(best), probe);
    }
  } else {
    hi = start;
    double alpha = start;
    for (int i = 0; i < cfg.max_bracket_steps; ++i) {
      alpha /= factor;
      Trial t = probe.run(alpha);
      if (t.feasible) {
        lo = alpha;
        best = std::move(t);
        break;
      }
      hi = alpha;
    }
    if (lo == 0.0) {
      std::ostringstream os;
      os << "rank-infeasible: no alpha down to " << hi
         << " reached rank <= " << p.target_rank;
      throw Error(ErrorCategory::rank_infeasible, os.str());
    }
  }

  for (int i = 0; i < cfg.bisection_iters; ++i) {
    if (hi / lo - 1.0 <= cfg.alpha_rel_tol) break;
    const double mid = std::sqrt(lo * hi);
    Trial t = probe.run(mid);
    if (t.feasible) {
      lo = mid;
      best = std::move(t);
    } else {
      hi = mid;
    }
  }
  return finish(lo, std::move(best), probe);
}

AlmResult nn_stls(const StlsProblem& p, const SolverConfig& cfg) {
  AlphaSearchResult r =
      alpha_search(p, ReweightPair::identity(p.rows(), p.cols()), cfg);
  return {std::move(r.solution), std::move(r.report)};
}

AlmResult reweighted_stls(const StlsProblem& p, const SolverConfig& cfg) {
  validate_problem(p);
  check_config(cfg);

  double baseline = 0.0;
  {
    const Vector s = singular_values(p.a_bar);
    baseline = s(s.size() - 1);
    if (!(baseline > 1e-12 * s(0))) baseline = 0.0;
  }

  ReweightPair rw = ReweightPair::identity(p.rows(), p.cols());
  double hint = 0.0;
  std::vector<double> round_errors;
  int runs = 0;
  long iterations = 0;
  AlphaSearchResult last;
  for (int round = 0; round <= cfg.max_reweights; ++round) {
    last = alpha_search(p, rw, cfg, hint);
    runs += last.alm_runs;
    iterations += last.total_iterations;
    if (baseline > 0.0)
      round_errors.push_back((p.a_bar - last.solution.a_hat).norm() / baseline);
    if (round == cfg.max_reweights) break;
    if (!std::isfinite(last.alpha)) break;  // fully fixed structure
    rw = update_reweight(rw, last.solution.a_hat, cfg.delta);
    hint = last.alpha;
  }

  auto& d = last.solution.diagnostics;
  d.round_relative_errors = std::move(round_errors);
  d.alm_runs = runs;
  d.total_iterations = iterations;
  return {std::move(last.solution), std::move(last.report)};
}

}  // namespace stls
