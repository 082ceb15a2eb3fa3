#include <stls/harness/io.hpp>

#include <stls/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace stls::io {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "parse error: line " << line << ": " << what;
  throw Error(ErrorCategory::parse, os.str());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  return ext == ".mtx" || ext == ".mm" ? MatrixFormat::matrix_market : MatrixFormat::csv;
}

Matrix parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      const std::string_view field =
          body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                              : comma - start);
      double v = 0.0;
      if (!parse_double(field, v))
        parse_error(number, "not a number: '" + std::string(trim(field)) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "ragged row: " << row.size() << " fields, expected " << rows.front().size();
      parse_error(number, os.str());
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw Error(ErrorCategory::io, "read failure");
  if (rows.empty()) parse_error(number, "no data rows");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Matrix parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line)) parse_error(1, "empty file");
  ++number;

  std::istringstream header(line);
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_error(number, "missing %%MatrixMarket banner");
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") parse_error(number, "unsupported object '" + object + "'");
  if (layout != "array" && layout != "coordinate")
    parse_error(number, "unsupported format '" + layout + "'");
  if (field != "real" && field != "integer" && field != "double")
    parse_error(number, "unsupported field type '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    parse_error(number, "unsupported symmetry '" + symmetry + "'");

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++number;
      const std::string_view body = trim(out);
      if (!body.empty() && body.front() != '%') return true;
    }
    return false;
  };

  if (!next_data_line(line)) parse_error(number, "missing size line");
  std::istringstream size_line(line);
  long long rows = 0, cols = 0, entries = 0;
  if (!(size_line >> rows >> cols) || rows < 1 || cols < 1)
    parse_error(number, "bad size line");
  const bool coordinate = layout == "coordinate";
  if (coordinate && (!(size_line >> entries) || entries < 0))
    parse_error(number, "bad size line: missing entry count");
  const bool symmetric = symmetry != "general";
  if (symmetric && rows != cols) parse_error(number, "symmetric matrix must be square");
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;

  Matrix m = Matrix::Zero(rows, cols);
  if (coordinate) {
    for (long long k = 0; k < entries; ++k) {
      if (!next_data_line(line)) parse_error(number, "fewer entries than declared");
      std::istringstream ls(line);
      long long i = 0, j = 0;
      std::string token;
      double v = 0.0;
      if (!(ls >> i >> j >> token) || !parse_double(token, v))
        parse_error(number, "bad coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols) parse_error(number, "index out of range");
      m(i - 1, j - 1) = v;
      if (symmetric && i != j) m(j - 1, i - 1) = mirror * v;
    }
  } else {
    for (Index j = 0; j < cols; ++j) {
      const Index first = symmetric ? (symmetry == "skew-symmetric" ? j + 1 : j) : 0;
      for (Index i = first; i < rows; ++i) {
        if (!next_data_line(line)) parse_error(number, "fewer values than declared");
        double v = 0.0;
        if (!parse_double(line, v)) parse_error(number, "not a number");
        m(i, j) = v;
        if (symmetric && i != j) m(j, i) = mirror * v;
      }
    }
  }
  if (next_data_line(line)) parse_error(number, "more entries than declared");
  return m;
}

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in = open_in(path);
  return format == MatrixFormat::csv ? parse_csv(in) : parse_matrix_market(in);
}

Matrix read_matrix(const std::filesystem::path& path) {
  return read_matrix(path, format_from_path(path));
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format17(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << format17(m(i, j)) << '\n';
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ofstream out = open_out(path);
  if (format == MatrixFormat::csv)
    write_csv(out, m);
  else
    write_matrix_market(out, m);
  if (!out) throw Error(ErrorCategory::io, "write failure on " + path.string());
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_matrix(path, m, format_from_path(path));
}

hetero::Instance read_instance(const std::filesystem::path& dir) {
  hetero::Instance inst;
  inst.s = read_matrix(dir / "S.csv", MatrixFormat::csv);
  inst.x = read_matrix(dir / "X.csv", MatrixFormat::csv);
  const bool has_z = std::filesystem::exists(dir / "z.csv");
  const bool has_u = std::filesystem::exists(dir / "U.csv");
  if (has_z != has_u)
    throw Error(ErrorCategory::invalid_input, "instance truth needs both z.csv and U.csv");
  if (has_z) {
    hetero::GroundTruth truth;
    const Matrix z = read_matrix(dir / "z.csv", MatrixFormat::csv);
    truth.z = z.reshaped();
    truth.u = read_matrix(dir / "U.csv", MatrixFormat::csv);
    inst.truth = std::move(truth);
  }
  hetero::validate(inst);
  return inst;
}

void write_instance(const std::filesystem::path& dir, const hetero::Instance& inst) {
  std::filesystem::create_directories(dir);
  write_matrix(dir / "S.csv", inst.s, MatrixFormat::csv);
  write_matrix(dir / "X.csv", inst.x, MatrixFormat::csv);
  if (inst.truth) {
    write_matrix(dir / "z.csv", Matrix(inst.truth->z), MatrixFormat::csv);
    write_matrix(dir / "U.csv", inst.truth->u, MatrixFormat::csv);
  }
}

}  // namespace stls::io
