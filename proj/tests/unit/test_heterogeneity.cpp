#include <stls/error.hpp>
#include <stls/heterogeneity.hpp>
#include <stls/linalg.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <set>

namespace {

using stls::Index;
using stls::Matrix;
using stls::Vector;
namespace het = stls::hetero;

TEST(BuildSystem, DefaultDimensions) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 1);
  const auto sys = het::build_system(inst);
  EXPECT_EQ(sys.a.rows(), 84);
  EXPECT_EQ(sys.a.cols(), 26);
  const Vector s = oracle::singular_values(sys.a);
  EXPECT_LE(s(25), 1e-10 * s(0));
  EXPECT_GT(s(24), 1e-6 * s(0));
}

TEST(BuildSystem, ScalarCase) {
  het::Instance inst;
  inst.s = Matrix::Ones(1, 1);
  inst.x = Matrix::Constant(1, 1, 2.5);
  const auto sys = het::build_system(inst);
  Matrix want(1, 2);
  want << 1.0, -2.5;
  EXPECT_EQ(sys.a, want);
  const auto sol = het::solve_noiseless(inst);
  EXPECT_NEAR(sol.u(0, 0) / sol.lambda_vec(0), 2.5, 1e-12);
  EXPECT_GT(sol.lambda_vec(0), 0.0);
}

TEST(BuildSystem, PlantedVectorInNullspace) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = het::synthesize(14, 2, 6, 0.0, seed);
    EXPECT_LE((het::build_system(inst).a * het::planted_vector(*inst.truth)).norm(), 1e-10);
  }
}

TEST(BuildSystem, IndexMapIsBijective) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 2);
  const auto sys = het::build_system(inst);
  std::set<std::pair<Index, Index>> seen;
  for (Index g = 0; g < 14; ++g)
    for (Index c = 0; c < 6; ++c) {
      const Index r = sys.row_of(g, c), k = sys.col_of(g);
      EXPECT_EQ(sys.a(r, k), -inst.x(g, c));
      seen.insert({r, k});
    }
  EXPECT_EQ(seen.size(), 84u);
  const Matrix support = sys.free_support();
  EXPECT_EQ(support.sum(), 84.0);
  for (const auto& [r, k] : seen) EXPECT_EQ(support(r, k), 1.0);
}

TEST(BuildSystem, InvalidInstanceRejected) {
  het::Instance inst;
  inst.s = Matrix::Zero(3, 2);
  inst.s(0, 0) = inst.s(1, 1) = 1.0;
  inst.x = Matrix::Ones(3, 4);
  EXPECT_THROW(het::build_system(inst), stls::Error);
  inst.s(2, 0) = 1.0;
  inst.x = Matrix::Ones(2, 4);
  EXPECT_THROW(het::build_system(inst), stls::Error);
}

TEST(SolveNoiseless, RecoversPlantedTruth) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sol = het::solve_noiseless(het::synthesize(14, 2, 6, 0.0, seed));
    ASSERT_TRUE(sol.cosine_to_truth.has_value());
    EXPECT_GE(*sol.cosine_to_truth, 0.9999);
    EXPECT_TRUE(sol.identifiable);
    EXPECT_TRUE(sol.warnings.empty());
    EXPECT_NEAR(sol.lambda_vec.norm(), 1.0, 1e-12);
    EXPECT_TRUE((sol.lambda_vec.array() > 0.0).all());
  }
}

TEST(SolveNoiseless, RecoveredPairReproducesData) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 3);
  const auto sol = het::solve_noiseless(inst);
  const Matrix lhs = sol.lambda_vec.asDiagonal() * inst.x;
  EXPECT_LE((lhs - inst.s * sol.u).norm(), 1e-10 * inst.x.norm());
}

TEST(SolveNoiseless, AmbiguousStatesFlagged) {
  // every gene marks both states, so only u1 + u2 is determined
  het::Instance inst;
  inst.s = Matrix::Ones(6, 2);
  inst.x = oracle::gaussian(6, 4, 5).cwiseAbs();
  bool flagged = false;
  try {
    const auto sol = het::solve_noiseless(inst);
    flagged = !sol.identifiable && !sol.warnings.empty();
  } catch (const stls::Error& e) {
    flagged = e.category() == stls::ErrorCategory::non_identifiable ||
              e.category() == stls::ErrorCategory::sign_indefinite;
  }
  EXPECT_TRUE(flagged);
}

TEST(SolveNoiseless, ScaleInvariance) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 4);
  auto scaled = inst;
  const double c = 3.7;
  scaled.x *= c;
  const auto a = het::solve_noiseless(inst);
  const auto b = het::solve_noiseless(scaled);
  Vector lifted = b.stacked();
  lifted.tail(14) *= c;
  EXPECT_GE(het::cosine(a.stacked(), lifted), 1.0 - 1e-10);
}

TEST(Synthesize, Deterministic) {
  const auto a = het::synthesize(14, 2, 6, 0.01, 42);
  const auto b = het::synthesize(14, 2, 6, 0.01, 42);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.truth->z, b.truth->z);
  EXPECT_EQ(a.truth->u, b.truth->u);
  EXPECT_NE(a.x, het::synthesize(14, 2, 6, 0.01, 43).x);
}

TEST(Synthesize, NoiselessIdentity) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 6);
  const Matrix lambda = inst.truth->z.cwiseInverse().asDiagonal();
  EXPECT_LE((lambda * inst.x - inst.s * inst.truth->u).norm(), 1e-12);
}

TEST(Synthesize, DefaultGeneSplit) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 7);
  EXPECT_EQ((inst.s.rowwise().sum().array() == 2.0).count(), 3);
  EXPECT_EQ(inst.s.col(0).sum() - 3.0, 5.0);
  EXPECT_EQ(inst.s.col(1).sum() - 3.0, 6.0);
}

TEST(Synthesize, InvalidArgumentsRejected) {
  EXPECT_THROW(het::synthesize(14, 2, 6, -0.1, 1), stls::Error);
  EXPECT_THROW(het::synthesize(2, 2, 6, 0.0, 1), stls::Error);
}

TEST(SolveNoisy, ZeroNoiseMatchesNoiseless) {
  const auto inst = het::synthesize(14, 2, 6, 0.0, 8);
  const auto clean = het::solve_noiseless(inst);
  const auto noisy = het::solve_noisy(inst, stls::SolverConfig{});
  EXPECT_LE((clean.stacked() - noisy.stacked()).norm(), 1e-4);
  EXPECT_LE(noisy.off_support_error, 1e-10);
  ASSERT_TRUE(noisy.x_error.has_value());
  EXPECT_LE(noisy.x_error->norm(), 1e-4 * inst.x.norm());
}

TEST(SolveNoisy, OnePercentNoise) {
  const auto inst = het::synthesize(14, 2, 6, 0.01, 1);
  const auto sol = het::solve_noisy(inst, stls::SolverConfig{});
  EXPECT_GE(*sol.cosine_to_truth, 0.95);
  EXPECT_LE(sol.off_support_error, 1e-10);
  EXPECT_EQ(sol.x_error->rows(), 14);
}

TEST(SolveNoisy, BadWeightShapeRejected) {
  het::NoisyOptions opts;
  opts.x_weights = Matrix::Ones(3, 3);
  EXPECT_THROW(het::solve_noisy(het::synthesize(14, 2, 6, 0.0, 1), stls::SolverConfig{}, opts),
               stls::Error);
}

TEST(SimplexNormalize, ColumnsSumToOne) {
  const Matrix u = oracle::gaussian(3, 4, 9).cwiseAbs();
  const Matrix out = het::simplex_normalize(u);
  for (Index c = 0; c < 4; ++c) EXPECT_NEAR(out.col(c).sum(), 1.0, 1e-14);
}

TEST(Cosine, Basics) {
  EXPECT_NEAR(het::cosine(Vector{{1.0, 0.0}}, Vector{{-2.0, 0.0}}), 1.0, 1e-15);
  EXPECT_EQ(het::cosine(Vector{{0.0, 0.0}}, Vector{{1.0, 0.0}}), 0.0);
}

}  // namespace
