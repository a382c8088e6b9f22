/// @file incomplete_factor.hpp
/// @brief Threshold-dropped incomplete Cholesky (ICT) and LDL^T (ILDLT), plus
///        fill-reducing ordering and triangular solves.

#ifndef SLR_INCOMPLETE_FACTOR_HPP
#define SLR_INCOMPLETE_FACTOR_HPP

#include <stdexcept>

#include "slr/sparse_matrix.hpp"

namespace slr {

/// Fill-reducing (approximate minimum degree) ordering; returns perm with
/// perm[old] = new.
std::vector<index_t> fill_reducing_order(const SymSparseMatrix& A);

/// Exact nonzero count of the Cholesky factor of P A P^T (diagonal included).
/// Test/diagnostic helper.
index_t symbolic_cholesky_fill(const SymSparseMatrix& A, const std::vector<index_t>& perm);

enum class FactorKind { ICT, ILDLT };

struct FactorOptions {
    double droptol = 0.0;      // entries below droptol * ||working column||_2 are dropped
    index_t max_fill = -1;     // kept off-diagonals per pivot column; <0 = unlimited
    bool strict = false;       // throw BreakdownError instead of perturbing bad pivots
    bool use_fill_ordering = true;
};

/// Thrown in strict mode when a pivot is nonpositive (ICT) or zero (ILDLT).
class BreakdownError : public std::runtime_error {
public:
    BreakdownError(FactorKind kind, index_t pivot_index, double pivot_value);
    index_t pivot_index;
    double pivot_value;
};

/// Lower-triangular incomplete factor in compressed columns, stored for the
/// permuted matrix P A P^T with perm[old] = new. For ICT the diagonal entry
/// leads each column; for ILDLT columns hold off-diagonals only and D is kept
/// separately (signs free). Immutable after construction; concurrent solves on
/// the same factor are safe.
struct IncompleteFactor {
    FactorKind kind = FactorKind::ICT;
    index_t n = 0;
    std::vector<index_t> perm;      // old -> new
    std::vector<index_t> col_ptr;   // size n+1
    std::vector<index_t> row_idx;
    std::vector<double> val;
    std::vector<double> D;          // ILDLT only
    double droptol = 0.0;
    index_t perturbations = 0;      // pivot fixes applied (non-strict mode)

    index_t nnz() const { return static_cast<index_t>(val.size()) + (kind == FactorKind::ILDLT ? n : 0); }

    /// x = A^{-1} b through the factor (forward/diagonal/backward, permuted).
    void solve(std::span<const double> b, std::span<double> x) const;
    DenseVector solve(const DenseVector& b) const;

    /// ICT only: y = L^{-1} P b (result in factor order) and x = P^T L^{-T} y.
    void solve_lower(std::span<const double> b, std::span<double> y) const;
    void solve_lower_transpose(std::span<const double> y, std::span<double> x) const;
};

/// Incomplete Cholesky with threshold dropping. A must have a positive
/// diagonal; droptol = 0 with unlimited fill reproduces the exact factor.
IncompleteFactor ict_factor(const SymSparseMatrix& A, const FactorOptions& opts = {});

/// Incomplete LDL^T with threshold dropping for symmetric (possibly
/// indefinite) matrices; exact when droptol = 0 and fill is unlimited.
IncompleteFactor ildlt_factor(const SymSparseMatrix& A, const FactorOptions& opts = {});

inline DenseVector factor_solve(const IncompleteFactor& F, const DenseVector& b) { return F.solve(b); }

}  // namespace slr

#endif  // SLR_INCOMPLETE_FACTOR_HPP
