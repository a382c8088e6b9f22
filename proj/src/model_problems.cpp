#include "slr/model_problems.hpp"

#include <stdexcept>

namespace slr {

SymSparseMatrix gen_laplacian_2d(index_t nx, index_t ny, double shift) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("gen_laplacian_2d: grid dimensions must be >= 1");
    SymSparseMatrix A;
    A.n = nx * ny;
    A.row_ptr.assign(A.n + 1, 0);
    A.col_idx.reserve(3 * A.n);
    A.values.reserve(3 * A.n);
    const double diag = 4.0 - shift;
    for (index_t j = 0; j < ny; ++j) {
        for (index_t i = 0; i < nx; ++i) {
            const index_t v = j * nx + i;
            if (j > 0) { A.col_idx.push_back(v - nx); A.values.push_back(-1.0); }
            if (i > 0) { A.col_idx.push_back(v - 1); A.values.push_back(-1.0); }
            A.col_idx.push_back(v);
            A.values.push_back(diag);
            A.row_ptr[v + 1] = static_cast<index_t>(A.col_idx.size());
        }
    }
    return A;
}

SymSparseMatrix gen_laplacian_3d(index_t nx, index_t ny, index_t nz, double shift) {
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("gen_laplacian_3d: grid dimensions must be >= 1");
    SymSparseMatrix A;
    A.n = nx * ny * nz;
    A.row_ptr.assign(A.n + 1, 0);
    A.col_idx.reserve(4 * A.n);
    A.values.reserve(4 * A.n);
    const double diag = 6.0 - shift;
    for (index_t k = 0; k < nz; ++k) {
        for (index_t j = 0; j < ny; ++j) {
            for (index_t i = 0; i < nx; ++i) {
                const index_t v = (k * ny + j) * nx + i;
                if (k > 0) { A.col_idx.push_back(v - nx * ny); A.values.push_back(-1.0); }
                if (j > 0) { A.col_idx.push_back(v - nx); A.values.push_back(-1.0); }
                if (i > 0) { A.col_idx.push_back(v - 1); A.values.push_back(-1.0); }
                A.col_idx.push_back(v);
                A.values.push_back(diag);
                A.row_ptr[v + 1] = static_cast<index_t>(A.col_idx.size());
            }
        }
    }
    return A;
}

}  // namespace slr
