#pragma once

#include <iosfwd>
#include <string>

#include "ccq/densemath.hpp"

namespace ccq {

// Text fixture format: "rows cols" then one "re im" pair per entry, row-major.
void write_matrix(std::ostream& os, const CMatrix& m);
CMatrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const CMatrix& m);
CMatrix load_matrix(const std::string& path);

}  // namespace ccq
