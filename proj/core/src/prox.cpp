#include <stls/prox.hpp>

#include <stls/error.hpp>
#include <stls/linalg.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace stls {

Matrix svt(const Matrix& z, double gamma) {
  if (!(gamma >= 0.0))
    throw Error(ErrorCategory::invalid_input, "svt: gamma must be >= 0");
  const SvdFactors f = svd(z);
  const Vector shrunk = (f.s.array() - gamma).cwiseMax(0.0);
  Index keep = 0;
  while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
  return f.u.leftCols(keep) * shrunk.head(keep).asDiagonal() *
         f.v.leftCols(keep).transpose();
}

double log_threshold_scalar(double y, double alpha, double delta) {
  if (!(alpha > 0.0))
    throw Error(ErrorCategory::invalid_input, "log_threshold: alpha must be > 0");
  if (!(delta >= 0.0))
    throw Error(ErrorCategory::invalid_input, "log_threshold: delta must be >= 0");
  // Stationary points of 1/2 (x - y)^2 + alpha log(delta + |x|) solve
  // x^2 + (delta - y) x + alpha - y delta = 0 on the side of y; the larger
  // root in magnitude is the local minimum.
  // |y| > 2 sqrt(alpha), with a few ulps of slack so values tied at the
  // threshold (alpha = y0^2 / 4 on a flat spectrum) all map to 0
  const double slack = 1.0 + 16.0 * std::numeric_limits<double>::epsilon();
  const bool outside = y * y > 4.0 * alpha * slack;
  if (outside && y > 0.0) {
    const double b = y - delta;
    const double disc = std::max(0.0, b * b - 4.0 * (alpha - y * delta));
    return 0.5 * (b + std::sqrt(disc));
  }
  if (outside && y < 0.0) {
    const double b = y + delta;
    const double disc = std::max(0.0, b * b - 4.0 * (alpha + y * delta));
    return 0.5 * (b - std::sqrt(disc));
  }
  return 0.0;
}

Matrix log_threshold_spectral(const Matrix& z, double alpha, double delta) {
  const SvdFactors f = svd(z);
  Vector mapped(f.s.size());
  for (Index i = 0; i < f.s.size(); ++i)
    mapped(i) = log_threshold_scalar(f.s(i), alpha, delta);
  return f.u * mapped.asDiagonal() * f.v.transpose();
}

ReweightPair ReweightPair::identity(Index rows, Index cols) {
  return {Matrix::Identity(rows, rows), Matrix::Identity(cols, cols)};
}

bool ReweightPair::is_identity() const {
  return w1.isIdentity(0.0) && w2.isIdentity(0.0);
}

ReweightPair update_reweight(const ReweightPair& prev, const Matrix& a_new,
                             double delta) {
  if (prev.w1.rows() != a_new.rows() || prev.w2.rows() != a_new.cols())
    throw Error(ErrorCategory::invalid_input,
                "update_reweight: weight dimensions do not match the iterate");
  const SvdFactors f = svd(prev.w1 * a_new * prev.w2);
  const double smax = f.s.size() > 0 ? f.s(0) : 0.0;
  const double reg = delta * smax;
  if (!(reg > 0.0) || !std::isfinite(reg))
    throw Error(ErrorCategory::degenerate,
                "update_reweight: weighted iterate is zero, weights unbounded");

  const Eigen::LLT<Matrix> l1(prev.w1);
  const Eigen::LLT<Matrix> l2(prev.w2);
  if (l1.info() != Eigen::Success || l2.info() != Eigen::Success)
    throw Error(ErrorCategory::invalid_input,
                "update_reweight: weights must be positive definite");
  const Matrix g1 = l1.solve(f.u);  // W1^-1 U
  const Matrix g2 = l2.solve(f.v);  // W2^-1 V
  Matrix y = g1 * f.s.asDiagonal() * g1.transpose();
  Matrix z = g2 * f.s.asDiagonal() * g2.transpose();
  y = 0.5 * (y + y.transpose());
  z = 0.5 * (z + z.transpose());
  if (!y.allFinite() || !z.allFinite())
    throw Error(ErrorCategory::degenerate,
                "update_reweight: non-finite intermediate");
  return {inv_sqrt_psd(y, reg), inv_sqrt_psd(z, reg)};
}

namespace {

void check_spectrum(const Vector& s) {
  if (s.size() == 0)
    throw Error(ErrorCategory::invalid_input, "empty spectrum");
  for (Index i = 0; i < s.size(); ++i) {
    if (!(s(i) >= 0.0) || !std::isfinite(s(i)))
      throw Error(ErrorCategory::invalid_input,
                  "spectrum must be finite and nonnegative");
    if (i > 0 && s(i) > s(i - 1))
      throw Error(ErrorCategory::invalid_input, "spectrum must be non-increasing");
  }
}

}  // namespace

double err_bound_rwnn(const Vector& sigmas) {
  check_spectrum(sigmas);
  const double smallest = sigmas(sigmas.size() - 1);
  if (!(smallest > 0.0))
    throw Error(ErrorCategory::degenerate, "err_bound_rwnn: sigma_N = 0");
  double sum = 0.0;
  for (Index i = 0; i + 1 < sigmas.size(); ++i) {
    const double a = sigmas(i) / smallest;
    // a - sqrt(a^2 - 1) written without cancellation
    const double term = 1.0 / (a + std::sqrt(std::max(0.0, a * a - 1.0)));
    sum += term * term;
  }
  return smallest * smallest * (1.0 + 0.5 * sum);
}

double err_bound_nn(const Vector& sigmas) {
  check_spectrum(sigmas);
  const double smallest = sigmas(sigmas.size() - 1);
  return static_cast<double>(sigmas.size()) * smallest * smallest;
}

}  // namespace stls
