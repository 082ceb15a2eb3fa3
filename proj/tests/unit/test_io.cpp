#include <stls/error.hpp>
#include <stls/harness/io.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using stls::Matrix;

Matrix m22() {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  return m;
}

stls::Error parse_failure(const std::string& text, bool mm = false) {
  std::istringstream in(text);
  try {
    if (mm)
      stls::io::parse_matrix_market(in);
    else
      stls::io::parse_csv(in);
  } catch (const stls::Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error for: " << text;
  return stls::Error(stls::ErrorCategory::parse, "");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stls_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Csv, ParsesRows) {
  std::istringstream in("1,2\n3,4");
  EXPECT_EQ(stls::io::parse_csv(in), m22());
}

TEST(Csv, SkipsCommentsAndBlankLines) {
  std::istringstream in("# header\n1, 2\n\n3 ,4\r\n");
  EXPECT_EQ(stls::io::parse_csv(in), m22());
}

TEST(Csv, RaggedRowNamesLine) {
  const auto e = parse_failure("1,2\n3");
  EXPECT_EQ(e.category(), stls::ErrorCategory::parse);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
}

TEST(Csv, BadNumberRejected) {
  const auto e = parse_failure("1,2\n3,x4\n");
  EXPECT_EQ(e.category(), stls::ErrorCategory::parse);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
}

TEST(Csv, EmptyInputRejected) { parse_failure("# nothing\n"); }

TEST(MatrixMarket, ArrayColumnMajor) {
  std::istringstream in("%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n");
  EXPECT_EQ(stls::io::parse_matrix_market(in), m22());
}

TEST(MatrixMarket, CoordinateSymmetric) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 2\n1 1 5\n3 2 -1.5\n");
  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = 5;
  want(2, 1) = want(1, 2) = -1.5;
  EXPECT_EQ(stls::io::parse_matrix_market(in), want);
}

TEST(MatrixMarket, SkewSymmetricArray) {
  std::istringstream in("%%MatrixMarket matrix array real skew-symmetric\n2 2\n7\n");
  Matrix want = Matrix::Zero(2, 2);
  want(1, 0) = 7;
  want(0, 1) = -7;
  EXPECT_EQ(stls::io::parse_matrix_market(in), want);
}

TEST(MatrixMarket, BadHeaderRejected) {
  EXPECT_EQ(parse_failure("%%MatrixMarket matrix array complex general\n1 1\n1\n", true).category(),
            stls::ErrorCategory::parse);
  parse_failure("1 1\n1\n", true);
  parse_failure("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", true);
  parse_failure("%%MatrixMarket matrix array real general\n2 2\n1\n2\n", true);
}

TEST(Formats, FromPath) {
  EXPECT_EQ(stls::io::format_from_path("a.mtx"), stls::io::MatrixFormat::matrix_market);
  EXPECT_EQ(stls::io::format_from_path("a.mm"), stls::io::MatrixFormat::matrix_market);
  EXPECT_EQ(stls::io::format_from_path("a.csv"), stls::io::MatrixFormat::csv);
}

TEST(RoundTrip, SeventeenDigitsLossless) {
  const fs::path dir = scratch("roundtrip");
  Matrix m = oracle::gaussian(7, 5, 1) * 1e3;
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -5e-300;
  m(2, 2) = 0.1 + 0.2;
  for (const char* name : {"m.csv", "m.mtx"}) {
    stls::io::write_matrix(dir / name, m);
    EXPECT_EQ(stls::io::read_matrix(dir / name), m) << name;
  }
}

TEST(RoundTrip, MissingFileIsIoError) {
  try {
    stls::io::read_matrix("/nonexistent/dir/x.csv");
    FAIL();
  } catch (const stls::Error& e) {
    EXPECT_EQ(e.category(), stls::ErrorCategory::io);
  }
}

TEST(Instance, RoundTrip) {
  const fs::path dir = scratch("instance");
  stls::hetero::Instance inst;
  inst.s = Matrix::Identity(3, 2);
  inst.s(2, 0) = inst.s(2, 1) = 1.0;
  inst.x = oracle::gaussian(3, 4, 2).cwiseAbs();
  stls::hetero::GroundTruth truth;
  truth.z = Eigen::VectorXd::Constant(3, 1.5);
  truth.u = Matrix::Constant(2, 4, 0.5);
  inst.truth = truth;
  stls::io::write_instance(dir, inst);
  const auto back = stls::io::read_instance(dir);
  EXPECT_EQ(back.s, inst.s);
  EXPECT_EQ(back.x, inst.x);
  ASSERT_TRUE(back.truth.has_value());
  EXPECT_EQ(back.truth->z, truth.z);
  EXPECT_EQ(back.truth->u, truth.u);
}

}  // namespace
