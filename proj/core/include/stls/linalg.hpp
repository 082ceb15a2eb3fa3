#pragma once

#include <stls/model.hpp>

#include <complex>

namespace stls {

/// Thin SVD A = U diag(s) V^T with s non-increasing. Each right singular
/// vector is signed so its largest-magnitude entry is positive (U follows),
/// which makes factors reproducible across backends.
struct SvdFactors {
  Matrix u;
  Vector s;
  Matrix v;

  Matrix reconstruct() const;
};

/// Throws (invalid_input) on non-finite entries.
SvdFactors svd(const Matrix& a);

/// Singular values only.
Vector singular_values(const Matrix& a);

/// Number of s_i strictly greater than rank_tol * s_1; zero for a zero
/// spectrum.
Index numerical_rank(const Vector& s, double rank_tol);

/// Last right singular vector of the thin SVD (requires rows >= cols), with
/// the largest-magnitude entry made positive.
Vector min_right_singular_vector(const Matrix& a);

/// Right singular vectors of any shape, padded to a full basis of R^cols;
/// column j pairs with the j-th singular value (zero past min(rows, cols)).
struct RightBasis {
  Vector s;  ///< length cols, non-increasing, zero-padded
  Matrix v;  ///< cols x cols orthogonal
};
RightBasis full_right_basis(const Matrix& a);

/// Solver for X + B1 X B2 = C with B1, B2 fixed and many right-hand sides.
///
/// Both coefficients are reduced once: symmetric pairs through real
/// eigendecompositions (the system becomes diagonal), general pairs through
/// complex Schur forms followed by column-wise triangular substitution
/// (Bartels-Stewart). Each solve then costs O(M^2 N + M N^2).
class SylvesterSolver {
 public:
  SylvesterSolver(const Matrix& b1, const Matrix& b2);

  Matrix solve(const Matrix& c) const;

  /// Smallest |1 + lambda_i(B1) lambda_j(B2)|; the system is singular when
  /// this vanishes.
  double smallest_pivot() const noexcept { return smallest_pivot_; }

  bool symmetric_path() const noexcept { return symmetric_; }

 private:
  using CMatrix = Eigen::MatrixXcd;

  bool symmetric_ = false;
  Index m_ = 0;
  Index n_ = 0;
  double smallest_pivot_ = 0.0;

  // Symmetric path: B1 = Q1 diag(d1) Q1^T, B2 = Q2 diag(d2) Q2^T.
  Matrix q1_, q2_;
  Matrix inv_denominator_;

  // General path: B1 = Z1 T1 Z1^*, B2 = Z2 T2 Z2^*.
  CMatrix z1_, t1_, z2_, t2_;
};

/// One-shot X + B1 X B2 = C. Throws SingularSystemError when
/// I + B2^T (x) B1 is singular.
Matrix solve_sylvester(const Matrix& b1, const Matrix& b2, const Matrix& c);

/// (Y + delta I)^{-1/2} for symmetric PSD Y. Eigenvalues down to
/// -1e-10 * max(1, ||Y||) are clamped to zero.
Matrix inv_sqrt_psd(const Matrix& y, double delta);

bool all_finite(const Matrix& a) noexcept;

}  // namespace stls
