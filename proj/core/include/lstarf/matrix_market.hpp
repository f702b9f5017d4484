#pragma once

#include <iosfwd>
#include <string>

#include "lstarf/matrix.hpp"

namespace lstarf {

/// Matrix Market `array real general` format: column-major entries, one per
/// line, written with 17 significant digits so that doubles round-trip.
void write_matrix_market(std::ostream& os, const DenseMatrix& m);
void write_matrix_market(const std::string& path, const DenseMatrix& m);

DenseMatrix read_matrix_market(std::istream& is);
DenseMatrix read_matrix_market(const std::string& path);

}  // namespace lstarf
