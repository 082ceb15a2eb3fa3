#pragma once

#include <stls/model.hpp>

namespace stls {

/// Singular value soft-thresholding: U max(S - gamma, 0) V^T, the proximal
/// map of gamma * ||.||_*.
Matrix svt(const Matrix& z, double gamma);

/// Minimizer of 1/2 (x - y)^2 + alpha log(delta + |x|) in the basin reached
/// by descending from y. Returns 0 when |y| <= 2 sqrt(alpha).
double log_threshold_scalar(double y, double alpha, double delta);

/// log_threshold_scalar applied to every singular value of z, rebuilt with
/// the same singular vectors.
Matrix log_threshold_spectral(const Matrix& z, double alpha, double delta);

/// Left/right weights of the reweighted nuclear norm ||W1 A W2||_*.
struct ReweightPair {
  Matrix w1;  ///< M x M symmetric positive definite
  Matrix w2;  ///< N x N symmetric positive definite

  static ReweightPair identity(Index rows, Index cols);
  bool is_identity() const;
};

/// One reweighting step of the log-det heuristic: with W1 A W2 = U S V^T,
/// Y = W1^-1 U S U^T W1^-1 and Z = W2^-1 V S V^T W2^-1, returns
/// ((Y + d I)^-1/2, (Z + d I)^-1/2) where d = delta * s_max.
/// Throws (degenerate) for a zero iterate.
ReweightPair update_reweight(const ReweightPair& prev, const Matrix& a_new,
                             double delta);

/// sigma_N^2 (1 + 1/2 sum_{i<N} (a_i - sqrt(a_i^2 - 1))^2), a_i =
/// sigma_i / sigma_N, for a non-increasing positive spectrum.
double err_bound_rwnn(const Vector& sigmas);

/// N sigma_N^2: squared error of soft-thresholding at sigma_N.
double err_bound_nn(const Vector& sigmas);

}  // namespace stls
