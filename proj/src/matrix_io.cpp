#include "ccq/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace ccq {

void write_matrix(std::ostream& os, const CMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      os << m(i, j).real() << ' ' << m(i, j).imag() << '\n';
    }
  }
}

CMatrix read_matrix(std::istream& is) {
  long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw ConfigError("matrix file: bad header");
  }
  CMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      if (!(is >> re >> im)) throw ConfigError("matrix file: truncated entry list");
      m(i, j) = cplx(re, im);
    }
  }
  if (!all_finite(m)) throw ConfigError("matrix file: non-finite entry");
  return m;
}

void save_matrix(const std::string& path, const CMatrix& m) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_matrix(os, m);
}

CMatrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_matrix(is);
}

}  // namespace ccq
