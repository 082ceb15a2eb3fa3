#include <stls/linalg.hpp>

#include <stls/error.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stls {

bool all_finite(const Matrix& a) noexcept { return a.allFinite(); }

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite())
    throw Error(ErrorCategory::invalid_input,
                std::string(what) + ": non-finite input");
}

// Flip (u_i, v_i) pairs so the largest-magnitude entry of v_i is positive.
void fix_signs(Matrix& u, Matrix& v) {
  for (Index i = 0; i < v.cols(); ++i) {
    Index arg = 0;
    v.col(i).cwiseAbs().maxCoeff(&arg);
    if (v(arg, i) < 0.0) {
      v.col(i) *= -1.0;
      if (i < u.cols()) u.col(i) *= -1.0;
    }
  }
}

}  // namespace

Matrix SvdFactors::reconstruct() const {
  return u * s.asDiagonal() * v.transpose();
}

SvdFactors svd(const Matrix& a) {
  require_finite(a, "svd");
  SvdFactors out;
  if (a.size() == 0) {
    out.u = Matrix(a.rows(), 0);
    out.v = Matrix(a.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = dec.matrixU();
  out.s = dec.singularValues();
  out.v = dec.matrixV();
  fix_signs(out.u, out.v);
  return out;
}

Vector singular_values(const Matrix& a) {
  require_finite(a, "singular_values");
  if (a.size() == 0) return Vector();
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

Index numerical_rank(const Vector& s, double rank_tol) {
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  const double cutoff = rank_tol * s(0);
  return static_cast<Index>((s.array() > cutoff).count());
}

Vector min_right_singular_vector(const Matrix& a) {
  if (a.rows() < a.cols())
    throw Error(ErrorCategory::invalid_input,
                "min_right_singular_vector: rows >= cols required");
  const SvdFactors f = svd(a);
  return f.v.col(f.v.cols() - 1);
}

RightBasis full_right_basis(const Matrix& a) {
  require_finite(a, "full_right_basis");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullV);
  RightBasis out;
  out.v = dec.matrixV();
  out.s = Vector::Zero(a.cols());
  out.s.head(dec.singularValues().size()) = dec.singularValues();
  Matrix unused(0, 0);
  fix_signs(unused, out.v);
  return out;
}

// ---------------------------------------------------------------------------
// Sylvester equation X + B1 X B2 = C
// ---------------------------------------------------------------------------

namespace {

bool is_symmetric(const Matrix& b) {
  return (b - b.transpose()).norm() <= 1e-12 * std::max(1.0, b.norm());
}

[[noreturn]] void throw_singular(double pivot) {
  std::ostringstream os;
  os << "Sylvester system is singular: smallest |1 + l1*l2| = " << pivot;
  throw SingularSystemError(os.str(), pivot);
}

}  // namespace

SylvesterSolver::SylvesterSolver(const Matrix& b1, const Matrix& b2)
    : m_(b1.rows()), n_(b2.rows()) {
  if (b1.rows() != b1.cols() || b2.rows() != b2.cols())
    throw Error(ErrorCategory::invalid_input,
                "solve_sylvester: coefficients must be square");
  require_finite(b1, "solve_sylvester");
  require_finite(b2, "solve_sylvester");

  symmetric_ = is_symmetric(b1) && is_symmetric(b2);
  double scale = 1.0;
  if (symmetric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> e1(0.5 * (b1 + b1.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> e2(0.5 * (b2 + b2.transpose()));
    q1_ = e1.eigenvectors();
    q2_ = e2.eigenvectors();
    const Vector& d1 = e1.eigenvalues();
    const Vector& d2 = e2.eigenvalues();
    const Matrix denom = (d1 * d2.transpose()).array() + 1.0;
    smallest_pivot_ = denom.cwiseAbs().minCoeff();
    scale += d1.cwiseAbs().maxCoeff() * d2.cwiseAbs().maxCoeff();
    inv_denominator_ = denom.cwiseInverse();
  } else {
    Eigen::ComplexSchur<Matrix> s1(b1);
    Eigen::ComplexSchur<Matrix> s2(b2);
    z1_ = s1.matrixU();
    t1_ = s1.matrixT();
    z2_ = s2.matrixU();
    t2_ = s2.matrixT();
    smallest_pivot_ = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m_; ++i)
      for (Index j = 0; j < n_; ++j)
        smallest_pivot_ =
            std::min(smallest_pivot_, std::abs(1.0 + t1_(i, i) * t2_(j, j)));
    scale += t1_.diagonal().cwiseAbs().maxCoeff() *
             t2_.diagonal().cwiseAbs().maxCoeff();
  }
  if (!(smallest_pivot_ > 1e-12 * scale)) throw_singular(smallest_pivot_);
}

Matrix SylvesterSolver::solve(const Matrix& c) const {
  if (c.rows() != m_ || c.cols() != n_)
    throw Error(ErrorCategory::invalid_input,
                "solve_sylvester: right-hand side has the wrong shape");
  if (symmetric_) {
    const Matrix f = q1_.transpose() * c * q2_;
    const Matrix y = f.cwiseProduct(inv_denominator_);
    return q1_ * y * q2_.transpose();
  }

  // Y + T1 Y T2 = F with both T upper triangular; sweep columns left to
  // right, each one a triangular solve with (I + t2_jj T1).
  const CMatrix f = z1_.adjoint() * c.cast<std::complex<double>>() * z2_;
  CMatrix y = CMatrix::Zero(m_, n_);
  const CMatrix eye = CMatrix::Identity(m_, m_);
  for (Index j = 0; j < n_; ++j) {
    Eigen::VectorXcd rhs = f.col(j);
    if (j > 0) rhs -= t1_ * (y.leftCols(j) * t2_.col(j).head(j));
    const CMatrix lhs = eye + t2_(j, j) * t1_;
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (z1_ * y * z2_.adjoint()).real();
}

Matrix solve_sylvester(const Matrix& b1, const Matrix& b2, const Matrix& c) {
  return SylvesterSolver(b1, b2).solve(c);
}

// ---------------------------------------------------------------------------

Matrix inv_sqrt_psd(const Matrix& y, double delta) {
  if (y.rows() != y.cols())
    throw Error(ErrorCategory::invalid_input, "inv_sqrt_psd: square input required");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCategory::invalid_input, "inv_sqrt_psd: delta must be > 0");
  require_finite(y, "inv_sqrt_psd");
  const double scale = std::max(1.0, y.norm());
  if ((y - y.transpose()).norm() > 1e-10 * scale)
    throw Error(ErrorCategory::invalid_input, "inv_sqrt_psd: input is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (y + y.transpose()));
  Vector lambda = eig.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() < -1e-10 * scale)
    throw Error(ErrorCategory::invalid_input,
                "inv_sqrt_psd: input is not positive semidefinite");
  lambda = lambda.cwiseMax(0.0);
  const Vector scaling = (lambda.array() + delta).rsqrt();
  const Matrix& q = eig.eigenvectors();
  Matrix out = q * scaling.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace stls
