#include "booom/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace booom {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd read_matrix_text(std::istream& in) {
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols)) {
    throw InputError("matrix text: missing or malformed header line");
  }
  if (rows < 1 || cols < 1 || rows > 1000000 || cols > 1000000) {
    throw InputError("matrix text: header dimensions out of range");
  }
  Eigen::MatrixXd m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!(in >> v)) {
        throw InputError("matrix text: expected " + std::to_string(rows * cols) +
                         " entries, stream ended early");
      }
      if (!std::isfinite(v)) {
        throw InputError("matrix text: non-finite entry rejected");
      }
      m(r, c) = v;
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file: " + path);
  Eigen::MatrixXd m = read_matrix_text(in);
  std::string extra;
  if (in >> extra) {
    throw InputError("matrix file has trailing content: " + path);
  }
  return m;
}

void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << " ";
      out << format_double(m(r, c));
    }
    out << "\n";
  }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write matrix file: " + path);
  write_matrix_text(out, m);
  if (!out) throw InputError("write failed: " + path);
}

std::string matrix_to_text(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  write_matrix_text(os, m);
  return os.str();
}

}  // namespace booom
