#include <stls/error.hpp>
#include <stls/prox.hpp>
#include <stls/tls.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>

namespace {

using stls::Index;
using stls::Matrix;
using stls::Vector;

TEST(PlainTls, DiagonalTruncation) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  const auto sol = stls::plain_tls(a, 1);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 2.0;
  EXPECT_LE((sol.a_hat - want).norm(), 1e-14);
  EXPECT_NEAR(sol.e_hat.norm(), 1.0, 1e-14);
  EXPECT_NEAR(sol.null_vec.norm(), 1.0, 1e-14);
}

TEST(PlainTls, ConsistentSystemRecoversBeta) {
  const Matrix x = oracle::gaussian(12, 3, 1);
  const Vector beta{{0.5, -2.0, 1.25}};
  Matrix a(12, 4);
  a << x, -x * beta;
  const auto sol = stls::plain_tls(a, 3);
  EXPECT_LE(sol.e_hat.norm(), 1e-12);
  ASSERT_TRUE(sol.beta.has_value());
  EXPECT_LE((*sol.beta - beta).norm(), 1e-10);
}

TEST(PlainTls, ErrorNormIsSmallestSingularValue) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = oracle::gaussian(20, 5, seed);
    const auto sol = stls::plain_tls(a, 4);
    EXPECT_NEAR(sol.e_hat.norm(), oracle::singular_values(a)(4), 1e-12);
    EXPECT_LE((a - sol.a_hat - sol.e_hat).norm(), 1e-12);
    EXPECT_NEAR(stls::relative_error(a, sol.a_hat), 1.0, 1e-12);
  }
}

TEST(PlainTls, EckartYoungSampling) {
  const Matrix a = oracle::gaussian(8, 5, 3);
  const double best = (a - stls::plain_tls(a, 4).a_hat).norm();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    // random rank-4 candidates, some near the optimum
    const Matrix b = seed % 2 == 0
                         ? oracle::gaussian(8, 4, seed) * oracle::gaussian(4, 5, seed + 500)
                         : oracle::truncate(a + 0.05 * oracle::gaussian(8, 5, seed), 4);
    EXPECT_LE(best, (a - b).norm() + 1e-12);
  }
}

TEST(PlainTls, StructuredProblemRejected) {
  const auto p = stls::StlsProblem::make(oracle::gaussian(4, 3, 1), stls::Toeplitz{});
  EXPECT_THROW(stls::plain_tls(p), stls::Error);
}

TEST(ExtractBeta, RatioDefinition) {
  const Vector beta = stls::extract_beta(Vector{{0.6, 0.8}});
  ASSERT_EQ(beta.size(), 1);
  EXPECT_NEAR(beta(0), 0.75, 1e-14);
}

TEST(ExtractBeta, ZeroLastEntryIsNongeneric) {
  try {
    stls::extract_beta(Vector{{1.0, 0.0}});
    FAIL() << "expected nongeneric";
  } catch (const stls::Error& e) {
    EXPECT_EQ(e.category(), stls::ErrorCategory::nongeneric);
  }
}

TEST(LogdetTls, DiagonalExample) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  const auto sol = stls::logdet_tls(a);
  EXPECT_NEAR(sol.a_hat(0, 0), 2.9142, 1e-4);
  EXPECT_NEAR(sol.a_hat(1, 1), 0.0, 1e-14);
  EXPECT_NEAR((a - sol.a_hat).norm(), 1.00368, 1e-5);
  EXPECT_NEAR(sol.alpha, 0.25, 1e-14);
}

TEST(LogdetTls, EqualSpectrumAnnihilated) {
  const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::gaussian(4, 4, 5)).householderQ();
  const auto sol = stls::logdet_tls(3.0 * q);
  EXPECT_EQ(sol.diagnostics.numerical_rank, 0);
  EXPECT_EQ(sol.diagnostics.annihilated, 4);
}

TEST(LogdetTls, ErrorWithinBound) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix a = oracle::gaussian(12, 6, seed);
    const auto sol = stls::logdet_tls(a);
    const double err = (a - sol.a_hat).squaredNorm();
    const Vector s = oracle::singular_values(a);
    EXPECT_LE(err, stls::err_bound_rwnn(s) * (1 + 1e-6));
    // closed form of the thresholded spectrum: sigma_N^2 (1 + 1/4 sum (a - sqrt(a^2 - 1))^2)
    const double sn = s(5);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double r = s(i) / sn;
      sum += std::pow(r - std::sqrt(r * r - 1.0), 2);
    }
    EXPECT_NEAR(err, sn * sn * (1.0 + 0.25 * sum), 1e-9 * err);
    EXPECT_EQ(sol.diagnostics.numerical_rank, 5);
  }
}

TEST(LogdetTls, CloseToTlsOnAverage) {
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix a = oracle::gaussian(30, 30, seed);
    sum += stls::relative_error(a, stls::logdet_tls(a).a_hat);
  }
  EXPECT_LE(sum / 20.0, 1.05);
  EXPECT_GE(sum / 20.0, 1.0);
}

}  // namespace
