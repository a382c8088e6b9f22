/// @file analysis.hpp
/// @brief Desk-scale spectral diagnostics: dense Schur complements, decay
///        metrics, the condition-number law kappa(theta), and the closed-form
///        two-domain grid model.

#ifndef SLR_ANALYSIS_HPP
#define SLR_ANALYSIS_HPP

#include <Eigen/Dense>

#include "slr/decomposition.hpp"

namespace slr {

/// Exact dense interface objects computed with exact factorizations:
///   S = C - E^T B^{-1} E, H = L^{-1} (C - S) L^{-T} with C = L L^T,
///   X = (I - H)^{-1} - I  (so S^{-1} = C^{-1} + L^{-T} X L^{-1}).
struct DenseSchur {
    Eigen::MatrixXd S;
    Eigen::MatrixXd C;
    Eigen::MatrixXd H;
    Eigen::MatrixXd X;
    Eigen::MatrixXd L;   // dense Cholesky factor of C
};

/// Dense Schur data for the decomposition; guards s <= 3000. p=1 (s=0) yields
/// empty matrices.
DenseSchur dense_schur(const DomainDecomposition& dd, index_t max_interface = 3000);

/// Diagnostic summary around the interface spectrum.
struct SpectralReport {
    DenseVector eig_H;              // ascending
    DenseVector eig_X;              // descending, nonnegative
    DenseVector eig_SinvCinv;       // eigenvalues of S^{-1} - C^{-1}, descending
    std::vector<std::pair<index_t, double>> capture_X;        // (m, fraction)
    std::vector<std::pair<index_t, double>> capture_SinvCinv;
    std::vector<std::pair<double, double>> kappa_samples;     // (theta, kappa)
};

SpectralReport spectral_report(const DomainDecomposition& dd, const std::vector<index_t>& ranks,
                               const std::vector<double>& theta_samples, index_t k_for_kappa);

/// Fraction of the eigenvalue sum captured by the m leading values
/// (values descending, nonnegative). All-zero spectra capture 1 by convention.
double capture_fraction(const DenseVector& eigs_descending, index_t m);

/// Spectral condition number of the corrected operator as a function of the
/// shift: (1-theta)/(1-lambda_{k+1}) on [0, lambda_s),
/// (1-lambda_s)/(1-lambda_{k+1}) on [lambda_s, lambda_{k+1}],
/// (1-lambda_s)/(1-theta) above.
double kappa_theta(double lambda_s, double lambda_k1, double theta);

/// eta_k = 1 + 2 sin^2(k pi / (2(nx+1))), k = 1..nx.
DenseVector model_eta(index_t nx);

/// Closed-form spectra for the two-domain split of an nx x (2ny+1) grid.
struct ModelSpectrum {
    DenseVector eta;           // k = 1..nx
    DenseVector theta;         // acosh(eta_k), evaluated stably
    DenseVector gamma;         // eigenvalues of S^{-1} - C^{-1}
    DenseVector gamma_approx;  // large-ny approximation
    DenseVector zeta;          // eigenvalues of S^{-1} C - I (zeta = 2 eta gamma)
    DenseVector lambda;        // matching eigenvalues of the interface map H
};

ModelSpectrum model_gamma(index_t nx, index_t ny);

/// Chebyshev polynomial of the second kind by the three-term recurrence.
double chebyshev_U(double t, index_t degree);

/// d_n from d_1 = 2a, d_k = 2a - 1/d_{k-1}; satisfies 1/d_n = U_{n-1}(a)/U_n(a).
double continued_fraction_d(double a, index_t n);

}  // namespace slr

#endif  // SLR_ANALYSIS_HPP
