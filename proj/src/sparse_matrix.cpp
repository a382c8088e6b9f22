#include "slr/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slr {

index_t SymSparseMatrix::nnz_full() const {
    index_t diag = 0;
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col_idx[k] == i) ++diag;
        }
    }
    return 2 * nnz_stored() - diag;
}

double SymSparseMatrix::lower_entry(index_t i, index_t j) const {
    const auto* begin = col_idx.data() + row_ptr[i];
    const auto* end = col_idx.data() + row_ptr[i + 1];
    const auto* it = std::lower_bound(begin, end, j);
    if (it != end && *it == j) return values[it - col_idx.data()];
    return 0.0;
}

std::string SymSparseMatrix::validate() const {
    if (static_cast<index_t>(row_ptr.size()) != n + 1) return "row_ptr size mismatch";
    if (col_idx.size() != values.size()) return "col/value size mismatch";
    for (index_t i = 0; i < n; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) return "row_ptr not monotone";
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col_idx[k] > i) return "entry above diagonal at row " + std::to_string(i);
            if (col_idx[k] < 0) return "negative column index";
            if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1]) {
                return "columns not strictly increasing in row " + std::to_string(i);
            }
            if (!std::isfinite(values[k])) return "non-finite value";
        }
    }
    return {};
}

void sym_matvec(const SymSparseMatrix& A, std::span<const double> x, std::span<double> y) {
    if (static_cast<index_t>(x.size()) != A.n || static_cast<index_t>(y.size()) != A.n) {
        throw std::invalid_argument("sym_matvec: dimension mismatch");
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (index_t i = 0; i < A.n; ++i) {
        double yi = 0.0;
        const double xi = x[i];
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            const double v = A.values[k];
            yi += v * x[j];
            if (j != i) y[j] += v * xi;   // mirrored upper entry
        }
        y[i] += yi;
    }
}

DenseVector sym_matvec(const SymSparseMatrix& A, const DenseVector& x) {
    DenseVector y(A.n);
    sym_matvec(A, std::span<const double>(x), std::span<double>(y));
    return y;
}

SymSparseMatrix sym_from_lower_triplets(index_t n, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row < t.col) throw std::invalid_argument("sym_from_lower_triplets: entry above diagonal");
        if (t.row >= n || t.col < 0) throw std::invalid_argument("sym_from_lower_triplets: index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SymSparseMatrix A;
    A.n = n;
    A.row_ptr.assign(n + 1, 0);
    A.col_idx.reserve(entries.size());
    A.values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        std::size_t m = k + 1;
        double v = entries[k].value;
        while (m < entries.size() && entries[m].row == entries[k].row && entries[m].col == entries[k].col) {
            v += entries[m].value;   // duplicates summed
            ++m;
        }
        A.col_idx.push_back(entries[k].col);
        A.values.push_back(v);
        ++A.row_ptr[entries[k].row + 1];
        k = m;
    }
    for (index_t i = 0; i < n; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
    return A;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

}  // namespace slr
