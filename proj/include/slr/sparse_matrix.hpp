/// @file sparse_matrix.hpp
/// @brief Symmetric sparse storage (lower triangle, CSR) and small dense types.

#ifndef SLR_SPARSE_MATRIX_HPP
#define SLR_SPARSE_MATRIX_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slr {

using index_t = std::int64_t;

using DenseVector = std::vector<double>;

/// Symmetric sparse matrix of order n. Only the lower triangle (col <= row,
/// diagonal included) is stored, in compressed sparse row form. Column indices
/// are strictly increasing within a row and duplicates are forbidden. The
/// logical matrix is A = L + L^T - diag(L), i.e. mirrored entries are implied.
struct SymSparseMatrix {
    index_t n = 0;
    std::vector<index_t> row_ptr;   // size n + 1
    std::vector<index_t> col_idx;   // col <= row
    std::vector<double> values;

    SymSparseMatrix() : row_ptr(1, 0) {}

    index_t nnz_stored() const { return static_cast<index_t>(values.size()); }

    /// Nonzeros of the logical (full symmetric) matrix.
    index_t nnz_full() const;

    /// Entry A(i,j) with i >= j; zero if not stored.
    double lower_entry(index_t i, index_t j) const;

    /// Structure and value checks for the stored-lower-triangle invariants.
    /// Returns an empty string if valid, otherwise a description of the defect.
    std::string validate() const;
};

/// Dense matrix with n rows and k columns, column-major.
struct DenseTallMatrix {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<double> data;   // rows * cols, column-major

    DenseTallMatrix() = default;
    DenseTallMatrix(index_t r, index_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double* col(index_t j) { return data.data() + static_cast<std::size_t>(j) * rows; }
    const double* col(index_t j) const { return data.data() + static_cast<std::size_t>(j) * rows; }
    double& operator()(index_t i, index_t j) { return data[static_cast<std::size_t>(j) * rows + i]; }
    double operator()(index_t i, index_t j) const { return data[static_cast<std::size_t>(j) * rows + i]; }
};

/// y = A x with symmetric expansion of the stored lower triangle.
void sym_matvec(const SymSparseMatrix& A, std::span<const double> x, std::span<double> y);
DenseVector sym_matvec(const SymSparseMatrix& A, const DenseVector& x);

/// One coordinate entry (used by builders and the Matrix Market layer).
struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Assemble a symmetric matrix from lower-triangle triplets (row >= col).
/// Duplicates are summed; entries with row < col are rejected.
SymSparseMatrix sym_from_lower_triplets(index_t n, std::vector<Triplet> entries);

// Vector kernels shared by the solvers. Deterministic (fixed reduction order).
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);   // y += alpha x
void scal(double alpha, std::span<double> x);

}  // namespace slr

#endif  // SLR_SPARSE_MATRIX_HPP
