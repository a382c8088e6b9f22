/// @file krylov.hpp
/// @brief Preconditioned conjugate gradient and restarted GMRES.

#ifndef SLR_KRYLOV_HPP
#define SLR_KRYLOV_HPP

#include <functional>
#include <iosfwd>

#include "slr/sparse_matrix.hpp"

namespace slr {

/// z = M^{-1} r; an empty function means no preconditioning.
using PrecondFn = std::function<void(std::span<const double>, std::span<double>)>;

struct SolveReport {
    bool converged = false;
    index_t iterations = 0;
    DenseVector history;        // relative residual per iteration, entry 0 = start
    double final_relres = 0.0;  // true ||b - Ax|| / ||b|| recomputed at exit
    double build_seconds = 0.0; // filled by the caller (preconditioner setup)
    double iter_seconds = 0.0;

    /// Two-column CSV: iteration,relres
    void write_history(std::ostream& out) const;
};

/// CG with an SPD preconditioner; stops when the recurrence residual satisfies
/// ||r|| <= tol ||b|| or maxit is reached. Throws on detected indefiniteness
/// (p^T A p <= 0).
SolveReport pcg(const SymSparseMatrix& A, const DenseVector& b, DenseVector& x,
                const PrecondFn& M = {}, double tol = 1e-8, index_t maxit = 300);

/// Right-preconditioned restarted GMRES; residual history is for the original
/// system. An Arnoldi breakdown yields the exact solution in the current
/// subspace.
SolveReport gmres(const SymSparseMatrix& A, const DenseVector& b, DenseVector& x,
                  const PrecondFn& M = {}, index_t restart = 40, double tol = 1e-8,
                  index_t maxit = 300);

}  // namespace slr

#endif  // SLR_KRYLOV_HPP
