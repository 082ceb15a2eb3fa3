#include <stls/projection.hpp>

#include <stls/error.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stls {

StructureProjector::StructureProjector(const ErrorStructure& structure,
                                       Index rows, Index cols)
    : rows_(rows), cols_(cols) {
  const auto& kind = structure.kind();
  if (std::holds_alternative<Unconstrained>(kind)) {
    kind_ = Kind::unconstrained;
  } else if (const auto* mask = std::get_if<FixedMask>(&kind)) {
    kind_ = Kind::mask;
    fixed_indicator_ = Matrix::Zero(rows, cols);
    fixed_values_ = Matrix::Zero(rows, cols);
    for (const auto& e : mask->entries) {
      if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
        throw Error(ErrorCategory::invalid_input,
                    "project_structure: mask index out of range");
      fixed_indicator_(e.row, e.col) = 1.0;
      fixed_values_(e.row, e.col) = e.value;
    }
    fixes_everything_ = fixed_indicator_.sum() == static_cast<double>(rows * cols);
  } else if (std::holds_alternative<Toeplitz>(kind)) {
    kind_ = Kind::toeplitz;
    fixes_everything_ = false;
  } else {
    const auto& lin = std::get<GeneralLinear>(kind);
    kind_ = Kind::linear;
    const auto count = static_cast<Index>(lin.constraints.size());
    l_.resize(count, rows * cols);
    b_.resize(count);
    for (Index i = 0; i < count; ++i) {
      const auto& c = lin.constraints[static_cast<std::size_t>(i)];
      if (c.l.rows() != rows || c.l.cols() != cols)
        throw Error(ErrorCategory::invalid_input,
                    "project_structure: constraint has the wrong shape");
      l_.row(i) = c.l.reshaped().transpose();
      b_(i) = c.b;
    }
    if (count > 0) {
      const Matrix gram = l_ * l_.transpose();
      gram_.compute(gram);
      const Vector d = gram_.vectorD().cwiseAbs();
      if (gram_.info() != Eigen::Success ||
          !(d.minCoeff() > 1e-12 * d.maxCoeff())) {
        std::ostringstream os;
        os << "project_structure: constraint Gram matrix is rank-deficient "
           << "(pivot ratio " << d.minCoeff() / d.maxCoeff() << ")";
        throw SingularSystemError(os.str(), d.minCoeff());
      }
    }
    fixes_everything_ = count >= rows * cols;
  }
}

Matrix StructureProjector::apply(const Matrix& e) const {
  if (e.rows() != rows_ || e.cols() != cols_)
    throw Error(ErrorCategory::invalid_input,
                "project_structure: dimension mismatch");
  switch (kind_) {
    case Kind::unconstrained:
      return e;
    case Kind::mask:
      return (fixed_indicator_.array() > 0.0).select(fixed_values_, e);
    case Kind::toeplitz: {
      Matrix out(rows_, cols_);
      // diagonal offset k = col - row, from -(rows-1) to cols-1
      for (Index k = -(rows_ - 1); k < cols_; ++k) {
        const Index i0 = std::max<Index>(0, -k);
        const Index len = std::min(rows_ - i0, cols_ - (i0 + k));
        double sum = 0.0;
        for (Index t = 0; t < len; ++t) sum += e(i0 + t, i0 + k + t);
        const double mean = sum / static_cast<double>(len);
        for (Index t = 0; t < len; ++t) out(i0 + t, i0 + k + t) = mean;
      }
      return out;
    }
    case Kind::linear: {
      if (l_.rows() == 0) return e;
      const Vector r = l_ * e.reshaped() - b_;
      const Vector coef = gram_.solve(r);
      Matrix out = e;
      out.reshaped() -= l_.transpose() * coef;
      return out;
    }
  }
  return e;
}

double StructureProjector::max_violation(const Matrix& e) const {
  switch (kind_) {
    case Kind::unconstrained:
      return 0.0;
    case Kind::mask:
      return (fixed_indicator_.array() > 0.0)
          .select(e - fixed_values_, Matrix::Zero(rows_, cols_))
          .cwiseAbs()
          .maxCoeff();
    case Kind::toeplitz: {
      if (rows_ < 2 || cols_ < 2) return 0.0;
      const Matrix diff = e.topLeftCorner(rows_ - 1, cols_ - 1) -
                          e.bottomRightCorner(rows_ - 1, cols_ - 1);
      return diff.cwiseAbs().maxCoeff() / std::sqrt(2.0);
    }
    case Kind::linear: {
      double worst = 0.0;
      for (Index i = 0; i < l_.rows(); ++i) {
        const double r = l_.row(i).dot(e.reshaped()) - b_(i);
        worst = std::max(worst, std::abs(r) / l_.row(i).norm());
      }
      return worst;
    }
  }
  return 0.0;
}

Matrix project_structure(const Matrix& e, const ErrorStructure& structure) {
  return StructureProjector(structure, e.rows(), e.cols()).apply(e);
}

}  // namespace stls
