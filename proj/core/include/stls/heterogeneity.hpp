#pragma once

#include <stls/model.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stls::hetero {

/// Planted decomposition X = diag(z) S U.
struct GroundTruth {
  Vector z;  ///< length M, positive
  Matrix u;  ///< K x N, nonnegative
};

/// Population-average measurements X (M genes x N conditions) and the
/// indicator matrix S (M genes x K states).
struct Instance {
  Matrix s;
  Matrix x;
  std::optional<GroundTruth> truth;

  Index genes() const noexcept { return s.rows(); }
  Index states() const noexcept { return s.cols(); }
  Index conditions() const noexcept { return x.cols(); }
};

/// Throws (invalid_input) listing what is wrong with the instance.
void validate(const Instance& inst);

/// The compound matrix [S (x) I_N, -blkdiag(X^T)] whose nullspace holds
/// [vec(U^T); lambda], together with the position of every X entry in it.
struct CompoundSystem {
  Matrix a;
  Index genes = 0;
  Index states = 0;
  Index conditions = 0;

  /// Row/column of X(gene, condition) inside `a` (stored negated).
  Index row_of(Index gene, Index condition) const noexcept {
    return gene * conditions + condition;
  }
  Index col_of(Index gene) const noexcept { return states * conditions + gene; }

  /// Indicator of the entries that carry measurement error (1 on the
  /// block-diagonal support of the right block).
  Matrix free_support() const;
};

CompoundSystem build_system(const Instance& inst);

/// Stacked [vec(U^T); lambda] for a planted truth (lambda = 1 / z).
Vector planted_vector(const GroundTruth& truth);

struct Solution {
  Matrix u;           ///< K x N
  Vector lambda_vec;  ///< length M, positive, unit 2-norm
  /// Normalization applied to the raw nullspace vector.
  std::string scale_convention = "unit-lambda";
  /// sigma_second_smallest / sigma_smallest of the system used.
  double nullspace_gap = 0.0;
  bool identifiable = true;
  std::optional<double> cosine_to_truth;
  /// Estimated errors in X (solve_noisy only).
  std::optional<Matrix> x_error;
  /// Largest |E| outside the block-diagonal support (solve_noisy only).
  double off_support_error = 0.0;
  std::vector<std::string> warnings;

  /// [vec(U^T); lambda].
  Vector stacked() const;
};

/// Below this gap the nullspace is treated as more than one-dimensional.
inline constexpr double kIdentifiabilityGap = 10.0;

Solution solve_noiseless(const Instance& inst);

struct NoisyOptions {
  /// Per-entry weights on X (M x N); empty means all ones.
  Matrix x_weights;
};

Solution solve_noisy(const Instance& inst, const SolverConfig& cfg,
                     const NoisyOptions& opts = {});

/// Rescale U so each column sums to one (off by default: absolute scale is
/// not identifiable).
Matrix simplex_normalize(const Matrix& u);

/// |<a, b>| / (||a|| ||b||).
double cosine(const Vector& a, const Vector& b);

/// Synthetic instance with the default 5/6/3 exclusive/shared gene split
/// for K = 2, M = 14. Deterministic in `seed`.
Instance synthesize(Index m, Index k, Index n, double noise_level,
                    std::uint64_t seed);

}  // namespace stls::hetero
