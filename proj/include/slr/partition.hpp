/// @file partition.hpp
/// @brief Graph partitioning into subdomains with a vertex-separator interface.

#ifndef SLR_PARTITION_HPP
#define SLR_PARTITION_HPP

#include <iosfwd>
#include <optional>

#include "slr/sparse_matrix.hpp"

namespace slr {

/// Per-vertex subdomain id in [0,p) plus an interface flag. Interface vertices
/// are those adjacent to another subdomain or designated separator vertices.
struct PartitionLabels {
    index_t p = 1;
    std::vector<index_t> subdomain;      // size n
    std::vector<std::uint8_t> interface; // size n, 0/1

    index_t n() const { return static_cast<index_t>(subdomain.size()); }
    index_t interface_size() const;
};

/// Checks that every vertex is labeled in [0,p) and that no stored entry of A
/// couples interiors of two different subdomains. Empty string when valid.
std::string validate_labels(const SymSparseMatrix& A, const PartitionLabels& labels);

/// Multilevel recursive bisection (heavy-edge matching coarsening, greedy
/// boundary refinement). The interface is derived from the edge cut: any vertex
/// adjacent to a different subdomain is flagged. Deterministic; ties in the
/// refinement go to the lowest vertex index.
PartitionLabels partition_graph(const SymSparseMatrix& A, index_t p);

/// Axis-aligned recursive bisection of a regular grid (x fastest). p must be a
/// power of two. Each cut designates a one-layer separator slab (owned by the
/// lower child) so that for p=2 the separator is the single middle grid line.
PartitionLabels geometric_bisection_grid(index_t nx, index_t ny, index_t p);
PartitionLabels geometric_bisection_grid(index_t nx, index_t ny, index_t nz, index_t p);

/// Debug dump: one "vertex subdomain interface_flag" line per vertex.
void write_labels(const PartitionLabels& labels, std::ostream& out);

}  // namespace slr

#endif  // SLR_PARTITION_HPP
