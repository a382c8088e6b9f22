// Shared test utilities: dense conversions and generators independent of the
// sparse implementation paths they are used to check.

#ifndef SLR_TESTS_ORACLES_HPP
#define SLR_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "slr/rng.hpp"
#include "slr/sparse_matrix.hpp"

namespace slr::test {

inline Eigen::MatrixXd to_dense(const SymSparseMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n, A.n);
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            M(i, A.col_idx[k]) = A.values[k];
            M(A.col_idx[k], i) = A.values[k];
        }
    }
    return M;
}

/// Random sparse symmetric diagonally dominant (hence SPD) matrix.
inline SymSparseMatrix random_sparse_spd(index_t n, double density, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Triplet> trip;
    DenseVector rowsum(n, 0.0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < i; ++j) {
            if (0.5 * (rng.uniform() + 1.0) < density) {
                const double v = rng.uniform();
                trip.push_back({i, j, v});
                rowsum[i] += std::abs(v);
                rowsum[j] += std::abs(v);
            }
        }
    }
    for (index_t i = 0; i < n; ++i) {
        trip.push_back({i, i, rowsum[i] + 0.5 + 0.5 * (rng.uniform() + 1.0)});
    }
    return sym_from_lower_triplets(n, std::move(trip));
}

inline DenseVector random_vector(index_t n, std::uint64_t seed) {
    DenseVector v(n);
    SplitMix64 rng(seed);
    rng.fill_uniform(v);
    return v;
}

inline bool multiset_match(DenseVector a, DenseVector b, double tol) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

inline double rel_frobenius_diff(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return (A - B).norm() / std::max(B.norm(), 1e-300);
}

}  // namespace slr::test

#endif
