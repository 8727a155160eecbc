#include <fstream>
#include <iomanip>
#include <sstream>

#include "rankrec/linalg.hpp"

namespace rankrec {

Matrix parse_matrix(std::istream& in) {
  long long rows = -1;
  long long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ArgumentError("matrix text: expected header \"rows cols\"");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows * cols));
  for (long long i = 0; i < rows * cols; ++i) {
    double v = 0.0;
    if (!(in >> v))
      throw ArgumentError("matrix text: expected " + std::to_string(rows * cols) +
                          " entries, got " + std::to_string(i));
    values.push_back(v);
  }
  std::string extra;
  if (in >> extra) throw ArgumentError("matrix text: trailing content \"" + extra + "\"");
  Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(values));
  if (!m.all_finite()) throw ArgumentError("matrix text: non-finite entry");
  return m;
}

Matrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix(in);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open matrix file " + path);
  return parse_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::defaultfloat << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

std::string format_matrix(const Matrix& m) {
  std::ostringstream out;
  write_matrix(out, m);
  return out.str();
}

}  // namespace rankrec
