/// @file matrix_market.hpp
/// @brief Matrix Market coordinate real symmetric I/O.

#ifndef SLR_MATRIX_MARKET_HPP
#define SLR_MATRIX_MARKET_HPP

#include <iosfwd>
#include <string>

#include "slr/sparse_matrix.hpp"

namespace slr {

/// Reads a coordinate real symmetric Matrix Market file. Duplicate entries are
/// summed; upper-triangle entries are folded to the lower triangle. A pair that
/// appears in both orientations ((i,j) and (j,i), i != j) is an error, since a
/// symmetric file stores one triangle.
SymSparseMatrix read_matrix_market(const std::string& path);
SymSparseMatrix read_matrix_market(std::istream& in, const std::string& name = "<stream>");

/// Writes the lower triangle as coordinate real symmetric, 17 significant digits.
void write_matrix_market(const SymSparseMatrix& A, const std::string& path);
void write_matrix_market(const SymSparseMatrix& A, std::ostream& out);

}  // namespace slr

#endif  // SLR_MATRIX_MARKET_HPP
