#pragma once

#include <stls/model.hpp>

namespace stls {

/// Frobenius-nearest projection onto {E : L(E) = b} for a fixed shape.
///
/// Construction does the per-structure work once (mask tables, the
/// factorized Gram matrix of general constraints) so apply() can run inside
/// every ALM iteration.
class StructureProjector {
 public:
  StructureProjector(const ErrorStructure& structure, Index rows, Index cols);

  Matrix apply(const Matrix& e) const;

  /// max_i |tr(L_i^T E) - b_i| / ||L_i||_F over the constraints implied by
  /// the structure (0 for Unconstrained).
  double max_violation(const Matrix& e) const;

  /// True when the structure pins every entry of E.
  bool fixes_everything() const noexcept { return fixes_everything_; }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

 private:
  enum class Kind { unconstrained, mask, toeplitz, linear };

  Kind kind_ = Kind::unconstrained;
  Index rows_ = 0;
  Index cols_ = 0;
  bool fixes_everything_ = false;

  // mask: 1 where fixed, with the fixed values alongside
  Matrix fixed_indicator_;
  Matrix fixed_values_;

  // general linear: rows of `l_` are vec(L_i)^T
  Matrix l_;
  Vector b_;
  Eigen::LDLT<Matrix> gram_;
};

/// One-shot projection; builds a projector per call.
Matrix project_structure(const Matrix& e, const ErrorStructure& structure);

}  // namespace stls
