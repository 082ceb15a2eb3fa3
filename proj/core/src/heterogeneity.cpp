#include <stls/heterogeneity.hpp>

#include <stls/alm.hpp>
#include <stls/error.hpp>
#include <stls/linalg.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace stls::hetero {

void validate(const Instance& inst) {
  std::vector<std::string> v;
  const Index m = inst.s.rows(), k = inst.s.cols(), n = inst.x.cols();
  if (m < 1 || k < 1 || n < 1) v.push_back("S and X must be non-empty");
  if (inst.x.rows() != m) {
    std::ostringstream os;
    os << "X has " << inst.x.rows() << " rows, S has " << m;
    v.push_back(os.str());
  }
  if (!inst.s.allFinite() || (inst.s.array() < 0.0).any())
    v.push_back("S entries must be finite and >= 0");
  if (!inst.x.allFinite()) v.push_back("X has non-finite entries");
  for (Index i = 0; i < m; ++i) {
    if ((inst.s.row(i).array() != 0.0).count() == 0) {
      std::ostringstream os;
      os << "gene " << i << " marks no state (zero row in S)";
      v.push_back(os.str());
    }
  }
  if (m * n < k * n + m - 1) v.push_back("too few equations: M*N < K*N + M - 1");
  if (inst.truth) {
    if (inst.truth->z.size() != m) v.push_back("truth z must have length M");
    if (inst.truth->u.rows() != k || inst.truth->u.cols() != n)
      v.push_back("truth U must be K x N");
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

Matrix CompoundSystem::free_support() const {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Index g = 0; g < genes; ++g)
    for (Index c = 0; c < conditions; ++c) out(row_of(g, c), col_of(g)) = 1.0;
  return out;
}

CompoundSystem build_system(const Instance& inst) {
  validate(inst);
  CompoundSystem sys;
  sys.genes = inst.genes();
  sys.states = inst.states();
  sys.conditions = inst.conditions();
  const Index m = sys.genes, k = sys.states, n = sys.conditions;

  sys.a = Matrix::Zero(m * n, k * n + m);
  // left block S (x) I_N acting on vec(U^T)
  for (Index g = 0; g < m; ++g)
    for (Index s = 0; s < k; ++s)
      for (Index c = 0; c < n; ++c) sys.a(g * n + c, s * n + c) = inst.s(g, s);
  // right block -blkdiag(X^T): row g of X in diagonal block g
  for (Index g = 0; g < m; ++g)
    for (Index c = 0; c < n; ++c) sys.a(sys.row_of(g, c), sys.col_of(g)) = -inst.x(g, c);
  return sys;
}

Vector planted_vector(const GroundTruth& truth) {
  const Matrix ut = truth.u.transpose();
  Vector out(ut.size() + truth.z.size());
  out.head(ut.size()) = ut.reshaped();
  out.tail(truth.z.size()) = truth.z.cwiseInverse();
  return out;
}

Vector Solution::stacked() const {
  const Matrix ut = u.transpose();
  Vector out(ut.size() + lambda_vec.size());
  out.head(ut.size()) = ut.reshaped();
  out.tail(lambda_vec.size()) = lambda_vec;
  return out;
}

double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0) || a.size() != b.size()) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

Matrix simplex_normalize(const Matrix& u) {
  Matrix out = u;
  for (Index c = 0; c < out.cols(); ++c) {
    const double sum = out.col(c).sum();
    if (sum != 0.0) out.col(c) /= sum;
  }
  return out;
}

namespace {

struct NullDirection {
  Vector v;
  double gap = 0.0;
};

// Smallest right singular direction of `a`. When the two smallest singular
// values are within the identifiability gap, the direction inside that
// 2-D subspace with the most weight on lambda is returned instead.
NullDirection null_direction(const Matrix& a, Index lambda_size) {
  const RightBasis rb = full_right_basis(a);
  const Index last = rb.v.cols() - 1;
  NullDirection out;
  const double smallest = rb.s(last);
  const double second = rb.s(last - 1);
  out.gap = smallest > 0.0 ? second / smallest
                           : std::numeric_limits<double>::infinity();
  if (out.gap >= kIdentifiabilityGap) {
    out.v = rb.v.col(last);
    return out;
  }
  const Matrix pair = rb.v.rightCols(2);
  Eigen::JacobiSVD<Matrix> dec(pair.bottomRows(lambda_size), Eigen::ComputeFullV);
  out.v = pair * dec.matrixV().col(0);
  return out;
}

Solution finalize(const Vector& raw, double gap, const Instance& inst) {
  const Index m = inst.genes(), k = inst.states(), n = inst.conditions();
  Solution sol;
  sol.nullspace_gap = gap;
  sol.identifiable = gap >= kIdentifiabilityGap;
  if (!sol.identifiable) {
    std::ostringstream os;
    os << "non-identifiable: nullspace gap " << gap << " < " << kIdentifiabilityGap;
    sol.warnings.push_back(os.str());
  }

  Vector v = raw;
  Vector lambda = v.tail(m);
  const double norm = lambda.norm();
  if (!(norm > 1e-12 * v.norm()))
    throw Error(ErrorCategory::non_identifiable,
                "non-identifiable: nullspace vector has no lambda component");
  const auto positive = (lambda.array() > 0.0).count();
  if (2 * positive < m) v = -v;
  v /= norm;
  lambda = v.tail(m);
  const double tol = 1e-12;
  if ((lambda.array() < -tol).any())
    throw Error(ErrorCategory::sign_indefinite,
                "sign-indefinite: recovered lambda has entries of both signs");

  sol.lambda_vec = lambda.cwiseMax(0.0);
  Matrix ut = v.head(k * n).reshaped(n, k);
  sol.u = ut.transpose();
  if (inst.truth) sol.cosine_to_truth = cosine(sol.stacked(), planted_vector(*inst.truth));
  return sol;
}

}  // namespace

Solution solve_noiseless(const Instance& inst) {
  const CompoundSystem sys = build_system(inst);
  const NullDirection dir = null_direction(sys.a, sys.genes);
  return finalize(dir.v, dir.gap, inst);
}

Solution solve_noisy(const Instance& inst, const SolverConfig& cfg,
                     const NoisyOptions& opts) {
  const CompoundSystem sys = build_system(inst);
  const Index m = sys.genes, n = sys.conditions;

  StlsProblem p = StlsProblem::make(sys.a, FixedMask::from_indicator(
                                               Matrix::Ones(sys.a.rows(), sys.a.cols()) -
                                               sys.free_support()));
  if (opts.x_weights.size() > 0) {
    if (opts.x_weights.rows() != m || opts.x_weights.cols() != n)
      throw Error(ErrorCategory::invalid_input, "solve_noisy: x_weights must be M x N");
    for (Index g = 0; g < m; ++g)
      for (Index c = 0; c < n; ++c)
        p.weights(sys.row_of(g, c), sys.col_of(g)) = opts.x_weights(g, c);
  }

  auto [stls_sol, report] = reweighted_stls(p, cfg);
  const NullDirection dir = null_direction(stls_sol.a_hat, m);
  Solution sol = finalize(dir.v, dir.gap, inst);

  // A_bar holds -X on the support, so X_hat = X + E and the error in X is -E.
  Matrix x_error(m, n);
  for (Index g = 0; g < m; ++g)
    for (Index c = 0; c < n; ++c)
      x_error(g, c) = -stls_sol.e_hat(sys.row_of(g, c), sys.col_of(g));
  sol.x_error = std::move(x_error);
  sol.off_support_error =
      (Matrix::Ones(sys.a.rows(), sys.a.cols()) - sys.free_support())
          .cwiseProduct(stls_sol.e_hat)
          .cwiseAbs()
          .maxCoeff();
  return sol;
}

Instance synthesize(Index m, Index k, Index n, double noise_level,
                    std::uint64_t seed) {
  if (m < 2 || k < 1 || n < 1)
    throw Error(ErrorCategory::invalid_input,
                "synthesize: m >= 2, k >= 1, n >= 1 required");
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
    throw Error(ErrorCategory::invalid_input, "synthesize: noise_level must be >= 0");
  if (m * n < k * n + m - 1)
    throw Error(ErrorCategory::invalid_input,
                "synthesize: dimensions leave too few equations (M*N < K*N + M - 1)");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Exclusive genes per state first, then genes shared by every state
  // (3 of 14 for the default; 5/6 exclusive split for K = 2).
  const Index shared = k >= 2 ? (3 * m) / 14 : 0;
  const Index exclusive = m - shared;
  Instance inst;
  inst.s = Matrix::Zero(m, k);
  Index row = 0;
  for (Index s = 0; s < k; ++s) {
    const Index count = exclusive / k + (s >= k - exclusive % k ? 1 : 0);
    for (Index i = 0; i < count; ++i) inst.s(row++, s) = 1.0;
  }
  for (; row < m; ++row) inst.s.row(row).setOnes();

  GroundTruth truth;
  truth.z.resize(m);
  const double lo = std::log(0.5), hi = std::log(2.0);
  for (Index i = 0; i < m; ++i) truth.z(i) = std::exp(lo + (hi - lo) * unit(rng));
  truth.u.resize(k, n);
  for (Index c = 0; c < n; ++c) {
    for (Index s = 0; s < k; ++s) truth.u(s, c) = unit(rng);
    truth.u.col(c) /= truth.u.col(c).sum();
  }

  const Matrix clean = truth.z.asDiagonal() * inst.s * truth.u;
  inst.x = clean;
  if (noise_level > 0.0) {
    const double sd = noise_level * clean.norm() / std::sqrt(static_cast<double>(m * n));
    for (Index c = 0; c < n; ++c)
      for (Index i = 0; i < m; ++i) inst.x(i, c) += sd * gauss(rng);
  }
  inst.truth = std::move(truth);
  return inst;
}

}  // namespace stls::hetero
