/// @file decomposition.hpp
/// @brief Reordered block system: permutation, B blocks, couplings E, interface C.

#ifndef SLR_DECOMPOSITION_HPP
#define SLR_DECOMPOSITION_HPP

#include "slr/partition.hpp"
#include "slr/sparse_matrix.hpp"

namespace slr {

/// Rectangular sparse block in CSR (general, not symmetric).
struct SparseBlock {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> row_ptr;
    std::vector<index_t> col_idx;
    std::vector<double> values;

    index_t nnz() const { return static_cast<index_t>(values.size()); }
    /// y = M x
    void matvec(std::span<const double> x, std::span<double> y) const;
    /// y += M^T x
    void matvec_transpose_add(std::span<const double> x, std::span<double> y) const;
};

/// The permuted block form of a symmetric matrix: interiors of each subdomain
/// first (blocks B_i on the diagonal, couplings E_i to the interface), then the
/// s interface unknowns with their block C. Immutable after construction.
struct DomainDecomposition {
    index_t n = 0;
    index_t p = 1;
    index_t s = 0;                        // interface size
    std::vector<index_t> perm;            // old -> new
    std::vector<index_t> inv_perm;        // new -> old
    std::vector<index_t> interior_start;  // size p+1, offsets into [0, n-s)
    std::vector<SymSparseMatrix> B;       // p interior blocks
    std::vector<SparseBlock> E;           // p blocks, interior-of-i x interface
    SymSparseMatrix C;                    // interface block, order s

    index_t interior_size(index_t d) const { return interior_start[d + 1] - interior_start[d]; }
    index_t interior_total() const { return n - s; }
};

/// Splits A according to the labels. The permuted matrix equals
/// [[blkdiag(B_1..B_p), E], [E^T, C]] entrywise; interface unknowns are ordered
/// by (owning subdomain, original index).
DomainDecomposition build_dd(const SymSparseMatrix& A, const PartitionLabels& labels);

/// Rebuilds the original matrix from the blocks (exact reassembly).
SymSparseMatrix reassemble(const DomainDecomposition& dd);

/// Gathers x (original order) into (interior | interface) permuted order, and back.
void permute_to_blocks(const DomainDecomposition& dd, std::span<const double> x, std::span<double> xp);
void permute_from_blocks(const DomainDecomposition& dd, std::span<const double> xp, std::span<double> x);

}  // namespace slr

#endif  // SLR_DECOMPOSITION_HPP
