/// @file model_problems.hpp
/// @brief Finite-difference Laplacian generators on regular grids.

#ifndef SLR_MODEL_PROBLEMS_HPP
#define SLR_MODEL_PROBLEMS_HPP

#include "slr/sparse_matrix.hpp"

namespace slr {

/// 5-point Laplacian on an nx x ny grid, Dirichlet boundary, x fastest.
/// Diagonal is 4 - shift (the shift is subtracted unscaled), off-diagonals -1.
SymSparseMatrix gen_laplacian_2d(index_t nx, index_t ny, double shift = 0.0);

/// 7-point Laplacian on nx x ny x nz, diagonal 6 - shift.
SymSparseMatrix gen_laplacian_3d(index_t nx, index_t ny, index_t nz, double shift = 0.0);

}  // namespace slr

#endif  // SLR_MODEL_PROBLEMS_HPP
