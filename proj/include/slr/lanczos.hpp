/// @file lanczos.hpp
/// @brief Lanczos iteration with partial reorthogonalization for the largest
///        eigenpairs of a symmetric operator applied matrix-free.

#ifndef SLR_LANCZOS_HPP
#define SLR_LANCZOS_HPP

#include <functional>

#include "slr/sparse_matrix.hpp"

namespace slr {

/// Matrix-free symmetric operator.
struct LinearOperator {
    index_t n = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
};

struct LanczosOptions {
    index_t max_steps = -1;       // <0: five times the requested count
    double tol = 1e-8;            // pair accepted when residual <= tol * lambda_1
    std::uint64_t seed = 20240601;
    bool full_reorth = false;     // always reorthogonalize instead of on demand
    index_t check_interval = 8;   // convergence test frequency (steps)
};

/// Approximate eigenpairs from the tridiagonal projection. Values are the
/// k+1 largest Ritz values in descending order; vectors hold the k leading
/// Ritz vectors. min_value is the smallest Ritz value of the final projection
/// (used for shift policies that target the bottom of the spectrum).
struct RitzSpectrum {
    index_t k = 0;
    DenseVector values;        // size min(k+1, steps)
    DenseTallMatrix vectors;   // n x k
    DenseVector residuals;     // residual norm estimate per value
    index_t steps = 0;
    double min_value = 0.0;
    bool converged = false;
};

/// Computes the k largest Ritz pairs of op. If deflate is nonnull, the
/// iteration runs in the orthogonal complement of its (orthonormal) columns.
RitzSpectrum lanczos_topk(const LinearOperator& op, index_t k, const LanczosOptions& opts = {},
                          const DenseTallMatrix* deflate = nullptr);

}  // namespace slr

#endif  // SLR_LANCZOS_HPP
