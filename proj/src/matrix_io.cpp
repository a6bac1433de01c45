#include "esn/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace esn {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ConfigError(context + ": cannot parse '" + token + "' as a number");
  }
  return v;
}

namespace {

void write_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                 const std::string& context) {
  Matrix m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> token)) {
        throw ConfigError(context + ": unexpected end of data at entry (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m(i, j) = parse_double(token, context);
    }
  }
  if (!m.allFinite()) {
    throw ConfigError(context + ": matrix contains non-finite entries");
  }
  return m;
}

Eigen::Index read_dim(std::istream& in, const std::string& context) {
  long long n = 0;
  if (!(in >> n) || n < 1) {
    throw ConfigError(context + ": expected a positive dimension header");
  }
  return static_cast<Eigen::Index>(n);
}

}  // namespace

void write_square_matrix(std::ostream& out, const Matrix& m) {
  require_square(m, "write_square_matrix");
  out << m.rows() << '\n';
  write_rows(out, m);
}

Matrix read_square_matrix(std::istream& in, const std::string& context) {
  const Eigen::Index n = read_dim(in, context);
  return read_rows(in, n, n, context);
}

void write_rect_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  write_rows(out, m);
}

Matrix read_rect_matrix(std::istream& in, const std::string& context) {
  const Eigen::Index rows = read_dim(in, context);
  const Eigen::Index cols = read_dim(in, context);
  return read_rows(in, rows, cols, context);
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  return out;
}

}  // namespace

void save_square_matrix(const std::string& path, const Matrix& m) {
  auto out = open_output(path);
  write_square_matrix(out, m);
}

Matrix load_square_matrix(const std::string& path) {
  auto in = open_input(path);
  return read_square_matrix(in, path);
}

void save_rect_matrix(const std::string& path, const Matrix& m) {
  auto out = open_output(path);
  write_rect_matrix(out, m);
}

Matrix load_rect_matrix(const std::string& path) {
  auto in = open_input(path);
  return read_rect_matrix(in, path);
}

}  // namespace esn
