/// @file slr_preconditioner.hpp
/// @brief Schur-complement preconditioner with a low-rank-corrected
///        approximate Schur inverse.
///
/// The preconditioner keeps the block factorization of the reordered system
/// and replaces the Schur complement inverse by
///     Stilde^{-1} = (1-theta)^{-1} C^{-1} + Z_k diag(d) Z_k^T,
/// where (lambda_i, Z_k) come from the dominant eigenpairs of the interface
/// map L^{-1} E^T B^{-1} E L^{-T} and theta is the shift substituted for the
/// truncated part of the spectrum.

#ifndef SLR_SLR_PRECONDITIONER_HPP
#define SLR_SLR_PRECONDITIONER_HPP

#include <memory>

#include "slr/interface_operator.hpp"
#include "slr/lanczos.hpp"

namespace slr {

struct ThetaPolicy {
    enum class Kind { LambdaKPlus1, LambdaS, Fixed, Zero, Grigori };
    Kind kind = Kind::LambdaKPlus1;
    double value = 0.0;   // Fixed: theta. Grigori: epsilon.

    static ThetaPolicy lambda_k_plus_1() { return {Kind::LambdaKPlus1, 0.0}; }
    static ThetaPolicy lambda_s() { return {Kind::LambdaS, 0.0}; }
    static ThetaPolicy fixed(double v) { return {Kind::Fixed, v}; }
    static ThetaPolicy zero() { return {Kind::Zero, 0.0}; }
    static ThetaPolicy grigori(double eps) { return {Kind::Grigori, eps}; }
};

struct SlrOptions {
    index_t p = 32;
    index_t k = 16;
    ThetaPolicy theta = ThetaPolicy::lambda_k_plus_1();
    double droptol_b = 1e-3;
    double droptol_c = 1e-3;
    index_t max_fill_b = -1;
    index_t max_fill_c = -1;
    bool indefinite = false;   // B blocks factored by ILDLT instead of ICT
    LanczosOptions lanczos;    // max_steps < 0 means five times the rank
};

/// Ritz data of the interface map plus the shift: Z_k = L^{-T} Uhat_k, the
/// retained eigenvalue estimates, and the precomputed correction diagonal
/// d_i = (1 - lambda_tilde_i)^{-1} - (1 - theta)^{-1}.
struct LowRankCorrection {
    DenseTallMatrix Z;        // s x k, columns L^{-T} Uhat_k
    DenseTallMatrix uhat;     // s x k, Ritz basis (kept for rank growth)
    DenseVector lambda;       // k retained values, descending
    DenseVector d;            // k correction weights
    double theta = 0.0;       // tail substitute, clamped to [0, 1-1e-10]
    double lambda_kp1 = 0.0;  // (k+1)-st value (raw)
    double lambda_min = 0.0;  // smallest Ritz value seen (raw)
    double leading_scale = 1.0;   // (1-theta_tail)^{-1} in front of C^{-1}
};

struct SlrBuildStats {
    index_t p = 0, k = 0, s = 0;
    double theta = 0.0;
    index_t lanczos_steps = 0;
    index_t matrix_nnz = 0;         // nnz of the full symmetric input
    double fill_ratio = 0.0;        // nnz(preconditioner) / nnz(A)
    double partition_seconds = 0.0; // excluded from build_seconds
    double build_seconds = 0.0;
    index_t b_perturbations = 0;
    index_t c_perturbations = 0;
};

class SlrPreconditioner {
public:
    std::shared_ptr<const DomainDecomposition> dd;
    std::shared_ptr<const std::vector<IncompleteFactor>> b_factors;
    std::shared_ptr<const IncompleteFactor> c_factor;
    LowRankCorrection correction;
    SlrBuildStats stats;
    SlrOptions options;

    index_t n() const { return dd->n; }
    index_t interface_size() const { return dd->s; }
    InterfaceOperator interface_op() const;

    /// y = Stilde^{-1} g on the interface unknowns.
    void apply_schur_inverse(std::span<const double> g, std::span<double> y) const;
    DenseVector apply_schur_inverse(const DenseVector& g) const;

    /// z = M^{-1} r (original ordering): two B solves and one Schur apply.
    void apply(std::span<const double> r, std::span<double> z) const;
    DenseVector apply(const DenseVector& r) const;
};

/// Partitions A (multilevel recursive bisection), factors the blocks, extracts
/// the dominant interface spectrum and assembles the correction.
SlrPreconditioner build_slr(const SymSparseMatrix& A, const SlrOptions& opts);

/// Same, with caller-provided partition labels (e.g. geometric grid cuts).
SlrPreconditioner build_slr(const SymSparseMatrix& A, const PartitionLabels& labels,
                            const SlrOptions& opts);

/// Grows the correction rank by k_extra new Lanczos directions, deflating the
/// basis already computed. Factors are shared with the input preconditioner.
SlrPreconditioner improve(const SlrPreconditioner& P, index_t k_extra);

/// Smallest k with lambda_{k+1} <= 1 - 1/K given a computed spectrum.
/// Throws std::runtime_error("insufficient spectrum") when the available
/// values cannot certify any such k.
index_t required_rank(const RitzSpectrum& spectrum, double K);

/// Doubles the requested rank until the spectrum certifies the rank needed to
/// bound the preconditioned condition number by K; returns that rank.
index_t certify_rank(const InterfaceOperator& op, double K, index_t cap,
                     const LanczosOptions& lopts = {});

/// CSV row of the build statistics: fill,p-t,nd,rk,theta,steps
std::string stats_csv_row(const SlrBuildStats& st, bool with_times = true);

}  // namespace slr

#endif  // SLR_SLR_PRECONDITIONER_HPP
