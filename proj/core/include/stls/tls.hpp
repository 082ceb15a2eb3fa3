#pragma once

#include <stls/model.hpp>

namespace stls {

/// Closest matrix of rank <= target_rank in Frobenius norm (SVD truncation).
StlsSolution plain_tls(const Matrix& a_bar, Index target_rank);

/// Same, for a problem record. Only unconstrained problems have a closed
/// form; anything else throws (invalid_input).
StlsSolution plain_tls(const StlsProblem& p);

/// Regression coefficients from a nullspace vector proportional to
/// [beta; 1]. Throws (nongeneric) when the last entry is ~0.
Vector extract_beta(const Vector& null_vec);

/// Non-adaptive log-det TLS: log-thresholding of the spectrum with
/// alpha = sigma_N^2 / 4 and delta = 0.
StlsSolution logdet_tls(const Matrix& a_bar);

}  // namespace stls
