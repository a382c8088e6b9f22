#include "slr/analysis.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slr {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat to_eigen_full(const SymSparseMatrix& A) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * A.values.size());
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            trip.emplace_back(i, j, A.values[k]);
            if (i != j) trip.emplace_back(j, i, A.values[k]);
        }
    }
    SpMat M(A.n, A.n);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::MatrixXd to_dense_sym(const SymSparseMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n, A.n);
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            M(i, A.col_idx[k]) = A.values[k];
            M(A.col_idx[k], i) = A.values[k];
        }
    }
    return M;
}

}  // namespace

DenseSchur dense_schur(const DomainDecomposition& dd, index_t max_interface) {
    DenseSchur out;
    const index_t s = dd.s;
    if (s == 0) return out;
    if (s > max_interface) {
        throw std::runtime_error("dense_schur: interface size " + std::to_string(s) +
                                 " exceeds the dense guard " + std::to_string(max_interface));
    }
    out.C = to_dense_sym(dd.C);

    // G = E^T B^{-1} E accumulated per subdomain with exact sparse Cholesky
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(s, s);
    for (index_t d = 0; d < dd.p; ++d) {
        const index_t m = dd.B[d].n;
        if (m == 0 || dd.E[d].nnz() == 0) continue;
        Eigen::SimplicialLLT<SpMat> llt(to_eigen_full(dd.B[d]));
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("dense_schur: interior block is not SPD");
        }
        // dense columns of E_d
        Eigen::MatrixXd Ed = Eigen::MatrixXd::Zero(m, s);
        for (index_t i = 0; i < dd.E[d].rows; ++i) {
            for (index_t t = dd.E[d].row_ptr[i]; t < dd.E[d].row_ptr[i + 1]; ++t) {
                Ed(i, dd.E[d].col_idx[t]) = dd.E[d].values[t];
            }
        }
        G.noalias() += Ed.transpose() * llt.solve(Ed);
    }
    out.S = out.C - G;
    Eigen::LLT<Eigen::MatrixXd> cllt(out.C);
    if (cllt.info() != Eigen::Success) {
        throw std::runtime_error("dense_schur: C block is not SPD");
    }
    out.L = cllt.matrixL();
    Eigen::MatrixXd tmp = out.L.triangularView<Eigen::Lower>().solve(G);
    out.H = out.L.triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();
    out.H = 0.5 * (out.H + out.H.transpose()).eval();
    Eigen::MatrixXd ImH = Eigen::MatrixXd::Identity(s, s) - out.H;
    out.X = ImH.ldlt().solve(Eigen::MatrixXd::Identity(s, s)) - Eigen::MatrixXd::Identity(s, s);
    out.X = 0.5 * (out.X + out.X.transpose()).eval();
    return out;
}

SpectralReport spectral_report(const DomainDecomposition& dd, const std::vector<index_t>& ranks,
                               const std::vector<double>& theta_samples, index_t k_for_kappa) {
    SpectralReport rep;
    DenseSchur ds = dense_schur(dd);
    const index_t s = dd.s;
    if (s == 0) return rep;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(ds.H);
    rep.eig_H.assign(eh.eigenvalues().data(), eh.eigenvalues().data() + s);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(ds.X);
    rep.eig_X.assign(ex.eigenvalues().data(), ex.eigenvalues().data() + s);
    std::reverse(rep.eig_X.begin(), rep.eig_X.end());

    Eigen::MatrixXd Sinv = ds.S.ldlt().solve(Eigen::MatrixXd::Identity(s, s));
    Eigen::MatrixXd Cinv = ds.C.ldlt().solve(Eigen::MatrixXd::Identity(s, s));
    Eigen::MatrixXd D = 0.5 * ((Sinv - Cinv) + (Sinv - Cinv).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(D);
    rep.eig_SinvCinv.assign(ed.eigenvalues().data(), ed.eigenvalues().data() + s);
    std::reverse(rep.eig_SinvCinv.begin(), rep.eig_SinvCinv.end());

    for (index_t m : ranks) {
        rep.capture_X.push_back({m, capture_fraction(rep.eig_X, m)});
        rep.capture_SinvCinv.push_back({m, capture_fraction(rep.eig_SinvCinv, m)});
    }
    if (!theta_samples.empty() && k_for_kappa >= 0 && k_for_kappa < s) {
        const double lam_s = rep.eig_H.front();
        const double lam_k1 = rep.eig_H[s - 1 - k_for_kappa];
        for (double th : theta_samples) {
            rep.kappa_samples.push_back({th, kappa_theta(lam_s, lam_k1, th)});
        }
    }
    return rep;
}

double capture_fraction(const DenseVector& eigs, index_t m) {
    double total = 0.0;
    for (double v : eigs) {
        if (v < -1e-12) throw std::invalid_argument("capture_fraction: negative eigenvalue");
        total += std::max(v, 0.0);
    }
    if (total == 0.0) return 1.0;
    double head = 0.0;
    const index_t mm = std::min<index_t>(m, static_cast<index_t>(eigs.size()));
    for (index_t i = 0; i < mm; ++i) head += std::max(eigs[i], 0.0);
    return head / total;
}

double kappa_theta(double lambda_s, double lambda_k1, double theta) {
    if (!(0.0 <= lambda_s && lambda_s <= lambda_k1 && lambda_k1 < 1.0)) {
        throw std::invalid_argument("kappa_theta: need 0 <= lambda_s <= lambda_k+1 < 1");
    }
    if (!(0.0 <= theta && theta < 1.0)) {
        throw std::invalid_argument("kappa_theta: need theta in [0,1)");
    }
    if (theta < lambda_s) return (1.0 - theta) / (1.0 - lambda_k1);
    if (theta <= lambda_k1) return (1.0 - lambda_s) / (1.0 - lambda_k1);
    return (1.0 - lambda_s) / (1.0 - theta);
}

DenseVector model_eta(index_t nx) {
    DenseVector eta(nx);
    for (index_t k = 1; k <= nx; ++k) {
        const double sn = std::sin(k * M_PI / (2.0 * (nx + 1)));
        eta[k - 1] = 1.0 + 2.0 * sn * sn;
    }
    return eta;
}

ModelSpectrum model_gamma(index_t nx, index_t ny) {
    ModelSpectrum ms;
    ms.eta = model_eta(nx);
    ms.theta.resize(nx);
    ms.gamma.resize(nx);
    ms.gamma_approx.resize(nx);
    ms.zeta.resize(nx);
    ms.lambda.resize(nx);
    for (index_t k = 1; k <= nx; ++k) {
        const double sn = std::sin(k * M_PI / (2.0 * (nx + 1)));
        const double th = 2.0 * std::asinh(sn);   // cosh(th) = 1 + 2 sn^2, stable near 1
        const double eta = ms.eta[k - 1];
        ms.theta[k - 1] = th;
        // gamma = sinh(ny th) / (eta [sinh((ny+2) th) - sinh(ny th)])
        //       = x (1-u) / (eta (1-x)(1+ux))   with x = e^{-2 th}, u = e^{-2 ny th}
        const double x = std::exp(-2.0 * th);
        const double u = std::exp(-2.0 * ny * th);
        const double gamma = x * (1.0 - u) / (eta * (1.0 - x) * (1.0 + u * x));
        ms.gamma[k - 1] = gamma;
        const double root = std::sqrt(eta * eta - 1.0);
        ms.gamma_approx[k - 1] = 1.0 / (2.0 * eta * ((eta * eta - 1.0) + eta * root));
        const double zeta = 2.0 * eta * gamma;
        ms.zeta[k - 1] = zeta;
        ms.lambda[k - 1] = zeta / (1.0 + zeta);
    }
    return ms;
}

double chebyshev_U(double t, index_t degree) {
    if (degree < 0) throw std::invalid_argument("chebyshev_U: degree must be >= 0");
    double um1 = 1.0;          // U_0
    if (degree == 0) return um1;
    double u = 2.0 * t;        // U_1
    for (index_t k = 1; k < degree; ++k) {
        const double next = 2.0 * t * u - um1;
        um1 = u;
        u = next;
    }
    return u;
}

double continued_fraction_d(double a, index_t n) {
    if (n < 1) throw std::invalid_argument("continued_fraction_d: n must be >= 1");
    if (!(a > 1.0)) throw std::invalid_argument("continued_fraction_d: need a > 1");
    double d = 2.0 * a;
    for (index_t k = 2; k <= n; ++k) {
        if (std::abs(d) < 1e-300) throw std::runtime_error("continued_fraction_d: division by near-zero");
        d = 2.0 * a - 1.0 / d;
    }
    return d;
}

}  // namespace slr
