#pragma once

#include <stls/heterogeneity.hpp>
#include <stls/model.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace stls::io {

enum class MatrixFormat { csv, matrix_market };

/// ".mtx" and ".mm" are MatrixMarket, anything else CSV.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Comma-separated rows; blank lines and lines starting with '#' are
/// skipped. Throws (parse) naming the offending line.
Matrix parse_csv(std::istream& in);

/// "%%MatrixMarket matrix {array,coordinate} {real,integer}
/// {general,symmetric,skew-symmetric}".
Matrix parse_matrix_market(std::istream& in);

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix read_matrix(const std::filesystem::path& path);

/// Every value printed with 17 significant digits.
void write_csv(std::ostream& out, const Matrix& m);
void write_matrix_market(std::ostream& out, const Matrix& m);

void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// Directory with S.csv, X.csv and optionally z.csv (column) and U.csv.
hetero::Instance read_instance(const std::filesystem::path& dir);
void write_instance(const std::filesystem::path& dir, const hetero::Instance& inst);

}  // namespace stls::io
