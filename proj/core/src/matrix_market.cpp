#include "lstarf/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lstarf/error.hpp"

namespace lstarf {

namespace {

constexpr const char* kBanner = "%%MatrixMarket matrix array real general";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void write_matrix_market(std::ostream& os, const DenseMatrix& m) {
  os << kBanner << '\n' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << buf << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const DenseMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_matrix_market(os, m);
  if (!os) throw IoError("write failed for '" + path + "'");
}

DenseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("matrix market: empty input");
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix" || format != "array" || field != "real" ||
      symmetry != "general") {
    throw IoError("matrix market: unsupported header '" + line + "'");
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  long long rows = 0, cols = 0;
  if (!(dims >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw IoError("matrix market: bad size line '" + line + "'");
  }
  const auto r = static_cast<std::size_t>(rows);
  const auto c = static_cast<std::size_t>(cols);
  std::vector<double> colmajor;
  colmajor.reserve(r * c);
  std::string tok;
  while (colmajor.size() < r * c && is >> tok) {
    if (tok[0] == '%') {
      std::getline(is, line);
      continue;
    }
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw IoError("matrix market: bad entry '" + tok + "'");
    }
    colmajor.push_back(x);
  }
  if (colmajor.size() != r * c) throw IoError("matrix market: truncated entry list");
  std::vector<double> rowmajor(r * c);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < r; ++i) rowmajor[i * c + j] = colmajor[j * r + i];
  try {
    return DenseMatrix(r, c, std::move(rowmajor));
  } catch (const ArgumentError& e) {
    throw IoError(std::string("matrix market: ") + e.what());
  }
}

DenseMatrix read_matrix_market(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_matrix_market(is);
}

}  // namespace lstarf
