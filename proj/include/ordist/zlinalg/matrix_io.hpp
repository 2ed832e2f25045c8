#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ordist/zlinalg/int_matrix.hpp"

namespace ordist {

/* Text format: a "rows cols" header line, then one line per row with
   base-10 entries separated by single spaces. */
inline void write_matrix(std::ostream& os, const IntMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << r[j].get_str();
    os << '\n';
  }
}

inline IntMatrix read_matrix(std::istream& is, IntMatrix::Storage storage = IntMatrix::Storage::dense) {
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::invalid_argument, "matrix: missing header");
  std::istringstream hs(line);
  long rows = -1, cols = -1;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0) throw Error(Errc::invalid_argument, "matrix: bad header");
  IntMatrix m(0, static_cast<std::size_t>(cols), storage);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw Error(Errc::invalid_argument, "matrix: truncated at row " + std::to_string(i));
    std::istringstream rs(line);
    IntVec r;
    std::string tok;
    while (rs >> tok) {
      Int v;
      if (v.set_str(tok, 10) != 0) throw Error(Errc::invalid_argument, "matrix: bad entry '" + tok + "'");
      r.push_back(v);
    }
    if (r.size() != static_cast<std::size_t>(cols))
      throw Error(Errc::invalid_argument, "matrix: row " + std::to_string(i) + " has wrong length");
    m.append_row(r);
  }
  return m;
}

inline std::string matrix_to_string(const IntMatrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

inline IntMatrix matrix_from_string(const std::string& s) {
  std::istringstream is(s);
  return read_matrix(is);
}

}  // namespace ordist
