#include <stls/harness/cli.hpp>
#include <stls/harness/io.hpp>
#include <stls/model.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using stls::Matrix;
using json = nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stls_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const Matrix& m) {
    stls::io::write_matrix(dir_ / name, m);
    return dir_ / name;
  }

  static json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, SvdErrorIsSmallestSingularValue) {
  const Matrix a = oracle::gaussian(20, 5, 1);
  stls::cli::SolveOptions o;
  o.input = write("a.csv", a).string();
  o.method = "svd";
  o.out = (dir_ / "out").string();
  std::ostringstream err;
  ASSERT_EQ(stls::cli::solve_cmd(o, err), stls::cli::kExitOk) << err.str();
  const Matrix e = stls::io::read_matrix(dir_ / "out" / "e_hat.csv");
  EXPECT_NEAR(e.norm(), oracle::singular_values(a)(4), 1e-12);
  EXPECT_EQ(stls::io::read_matrix(dir_ / "out" / "null_vec.csv").rows(), 5);
}

TEST_F(Cli, DiagnosticsHaveExactlyFiveKeys) {
  stls::cli::SolveOptions o;
  o.input = write("a.csv", oracle::gaussian(6, 4, 2)).string();
  o.method = "nn";
  o.out = (dir_ / "out").string();
  std::ostringstream err;
  ASSERT_EQ(stls::cli::solve_cmd(o, err), stls::cli::kExitOk) << err.str();
  const json j = read_json(dir_ / "out" / "diagnostics.json");
  ASSERT_EQ(j.size(), 5u);
  EXPECT_TRUE(j.at("alpha").is_number_float());
  EXPECT_TRUE(j.at("iterations").is_number_integer());
  EXPECT_TRUE(j.at("feas_residual").is_number());
  EXPECT_EQ(j.at("rank").get<int>(), 3);
  EXPECT_TRUE(j.at("converged").is_boolean());
}

TEST_F(Cli, FullyFixedMaskIsRankInfeasible) {
  stls::cli::SolveOptions o;
  o.input = write("a.csv", oracle::gaussian(5, 3, 3)).string();
  o.structure = "mask:" + write("mask.csv", Matrix::Ones(5, 3)).string();
  o.method = "rwnn";
  o.out = (dir_ / "out").string();
  std::ostringstream err;
  EXPECT_EQ(stls::cli::solve_cmd(o, err), stls::cli::kExitSolver);
  const json j = json::parse(err.str());
  EXPECT_EQ(j.at("error"), "rank-infeasible");
}

TEST_F(Cli, ReweightedNoWorseThanNuclearNorm) {
  const Matrix a = oracle::gaussian(8, 8, 4);
  const std::string input = write("a.csv", a).string();
  const double sn = oracle::singular_values(a)(7);
  auto err_of = [&](const std::string& method) {
    stls::cli::SolveOptions o;
    o.input = input;
    o.method = method;
    o.out = (dir_ / method).string();
    std::ostringstream err;
    EXPECT_EQ(stls::cli::solve_cmd(o, err), stls::cli::kExitOk) << err.str();
    return (a - stls::io::read_matrix(dir_ / method / "a_hat.csv")).norm() / sn;
  };
  EXPECT_LE(err_of("rwnn"), err_of("nn") + 1e-6);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  const std::string input = write("a.csv", oracle::gaussian(4, 3, 5)).string();
  EXPECT_EQ(stls::cli::run({"solve", "--input", input}), stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"solve", "--input", input, "--out", dir_.string(), "--bogus"}),
            stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"solve", "--input", input, "--out", dir_.string(), "--method", "qr"}),
            stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"solve", "--input", input, "--out", dir_.string(), "--method", "svd",
                            "--structure", "toeplitz"}),
            stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"experiment", "fig9"}), stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"experiment", "fig1a", "--sizes", "1,x"}), stls::cli::kExitUsage);
  EXPECT_EQ(stls::cli::run({"solve", "--input", input, "--out", dir_.string(), "--mu-growth", "0.5"}),
            stls::cli::kExitUsage);
}

TEST_F(Cli, MissingInputExitsThree) {
  EXPECT_EQ(stls::cli::run({"solve", "--input", (dir_ / "none.csv").string(), "--out",
                            (dir_ / "out").string()}),
            stls::cli::kExitIo);
}

TEST_F(Cli, MalformedInputExitsThree) {
  std::ofstream(dir_ / "bad.csv") << "1,2\n3\n";
  EXPECT_EQ(stls::cli::run({"solve", "--input", (dir_ / "bad.csv").string(), "--out",
                            (dir_ / "out").string()}),
            stls::cli::kExitIo);
}

TEST_F(Cli, InvalidProblemExitsFour) {
  EXPECT_EQ(stls::cli::run({"solve", "--input", write("w.csv", oracle::gaussian(2, 4, 6)).string(),
                            "--out", (dir_ / "out").string(), "--method", "nn"}),
            stls::cli::kExitSolver);
}

TEST_F(Cli, MatrixMarketInputAndToeplitz) {
  const std::string input = write("a.mtx", oracle::gaussian(6, 6, 7)).string();
  ASSERT_EQ(stls::cli::run({"solve", "--input", input, "--out", (dir_ / "out").string(),
                            "--structure", "toeplitz", "--method", "nn"}),
            stls::cli::kExitOk);
  const Matrix e = stls::io::read_matrix(dir_ / "out" / "e_hat.csv");
  for (int i = 1; i < 6; ++i)
    for (int j = 1; j < 6; ++j) EXPECT_NEAR(e(i, j), e(i - 1, j - 1), 1e-10);
}

TEST_F(Cli, SeedFromEnvironment) {
  ::setenv("STLS_SEED", "123", 1);
  EXPECT_EQ(stls::cli::default_seed(), 123u);
  const auto a = dir_ / "env.csv", b = dir_ / "flag.csv";
  ASSERT_EQ(stls::cli::run({"experiment", "fig1b", "--sizes", "4", "--trials", "2", "--out",
                            a.string()}),
            stls::cli::kExitOk);
  ::unsetenv("STLS_SEED");
  EXPECT_EQ(stls::cli::default_seed(9), 9u);
  ASSERT_EQ(stls::cli::run({"experiment", "fig1b", "--sizes", "4", "--trials", "2", "--seed",
                            "123", "--out", b.string()}),
            stls::cli::kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  ::setenv("STLS_SEED", "abc", 1);
  EXPECT_EQ(stls::cli::default_seed(5), 5u);
  ::unsetenv("STLS_SEED");
}

TEST_F(Cli, HeteroWritesOutputs) {
  const auto out = dir_ / "het";
  ASSERT_EQ(stls::cli::run({"hetero", "--method", "svd", "--seed", "3", "--out", out.string(),
                            "--write-instance", (dir_ / "inst").string()}),
            stls::cli::kExitOk);
  EXPECT_EQ(stls::io::read_matrix(out / "U.csv").rows(), 2);
  EXPECT_EQ(stls::io::read_matrix(out / "lambda.csv").rows(), 14);
  const json j = read_json(out / "summary.json");
  EXPECT_GE(j.at("cosine_to_truth").get<double>(), 0.9999);
  ASSERT_EQ(stls::cli::run({"hetero", "--method", "svd", "--input", (dir_ / "inst").string(),
                            "--out", (dir_ / "again").string()}),
            stls::cli::kExitOk);
  EXPECT_EQ(slurp(out / "U.csv"), slurp(dir_ / "again" / "U.csv"));
}

}  // namespace
