#include "slr/lanczos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slr/rng.hpp"

namespace slr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void orthogonalize_against(std::span<double> w, const DenseTallMatrix& Q, index_t ncols) {
    for (index_t c = 0; c < ncols; ++c) {
        const double* q = Q.col(c);
        const double h = dot(w, std::span<const double>(q, w.size()));
        axpy(-h, std::span<const double>(q, w.size()), w);
    }
}

struct TridiagEig {
    DenseVector values;      // ascending
    Eigen::MatrixXd vectors;
};

TridiagEig eig_tridiag(const DenseVector& alpha, const DenseVector& beta, index_t m) {
    Eigen::VectorXd d(m), e(m > 1 ? m - 1 : 1);
    for (index_t i = 0; i < m; ++i) d[i] = alpha[i];
    for (index_t i = 0; i + 1 < m; ++i) e[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(std::max<index_t>(m - 1, 0)), Eigen::ComputeEigenvectors);
    TridiagEig out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
    out.vectors = es.eigenvectors();
    return out;
}

}  // namespace

RitzSpectrum lanczos_topk(const LinearOperator& op, index_t k, const LanczosOptions& opts,
                          const DenseTallMatrix* deflate) {
    const index_t n = op.n;
    if (n <= 0) throw std::invalid_argument("lanczos_topk: operator dimension is zero");
    if (k < 1 || k >= n) throw std::invalid_argument("lanczos_topk: need 1 <= k < dimension");
    const index_t want = std::min<index_t>(k + 1, n);
    index_t m_cap = opts.max_steps > 0 ? opts.max_steps : 5 * k;
    m_cap = std::min(m_cap, n);
    m_cap = std::max(m_cap, want);
    const index_t ndefl = deflate ? deflate->cols : 0;
    if (deflate) m_cap = std::min(m_cap, n - ndefl);

    DenseTallMatrix Q(n, m_cap + 1);
    DenseVector alpha, beta;
    alpha.reserve(m_cap);
    beta.reserve(m_cap);

    SplitMix64 rng(opts.seed);
    auto fresh_vector = [&](std::span<double> q, index_t ncols) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            rng.fill_uniform(q);
            if (deflate) {
                orthogonalize_against(q, *deflate, ndefl);
                orthogonalize_against(q, *deflate, ndefl);
            }
            orthogonalize_against(q, Q, ncols);
            orthogonalize_against(q, Q, ncols);
            const double nrm = norm2(q);
            if (nrm > 1e-8) {
                scal(1.0 / nrm, q);
                return;
            }
        }
        throw std::runtime_error("lanczos_topk: cannot generate a new start vector");
    };

    fresh_vector(std::span<double>(Q.col(0), n), 0);

    // loss-of-orthogonality estimates: omega_cur[i] ~ <q_j, q_i>
    DenseVector omega_prev(m_cap + 1, 0.0), omega_cur(m_cap + 1, 0.0), omega_next(m_cap + 1, 0.0);
    omega_cur[0] = 1.0;
    bool reorth_next = false;
    double beta_max = 0.0;

    DenseVector w(n);
    index_t m = 0;
    bool converged = false;

    auto top_converged = [&](const TridiagEig& te, double btail) {
        if (static_cast<index_t>(te.values.size()) < want) return false;
        const index_t mm = static_cast<index_t>(te.values.size());
        const double lam1 = std::abs(te.values[mm - 1]);
        if (lam1 == 0.0) return true;
        for (index_t i = 0; i < want; ++i) {
            const double res = std::abs(btail * te.vectors(mm - 1, mm - 1 - i));
            if (res > opts.tol * lam1) return false;
        }
        return true;
    };

    for (index_t j = 0; j < m_cap; ++j) {
        op.apply(std::span<const double>(Q.col(j), n), w);
        if (deflate) orthogonalize_against(w, *deflate, ndefl);
        if (j > 0) axpy(-beta[j - 1], std::span<const double>(Q.col(j - 1), n), w);
        const double aj = dot(w, std::span<const double>(Q.col(j), n));
        axpy(-aj, std::span<const double>(Q.col(j), n), w);
        alpha.push_back(aj);

        const double scale = std::max(beta_max, std::abs(aj)) + kEps;
        double bj = norm2(w);

        // omega recurrence for the would-be q_{j+1}
        bool need_reorth = opts.full_reorth || reorth_next;
        reorth_next = false;
        if (!opts.full_reorth && bj > 0.0) {
            for (index_t i = 0; i < j; ++i) {
                double t = beta[i] * omega_cur[i + 1] + (alpha[i] - aj) * omega_cur[i] -
                           (j > 0 ? beta[j - 1] * omega_prev[i] : 0.0);
                if (i > 0) t += beta[i - 1] * omega_cur[i - 1];
                omega_next[i] = t / bj + kEps * (scale / bj) * 2.0;
            }
            omega_next[j] = kEps * static_cast<double>(n) * (scale / bj) * 0.5 + kEps;
            omega_next[j + 1] = 1.0;
            double worst = 0.0;
            for (index_t i = 0; i <= j; ++i) worst = std::max(worst, std::abs(omega_next[i]));
            if (worst > std::sqrt(kEps)) need_reorth = true;
        }
        if (need_reorth) {
            orthogonalize_against(w, Q, j + 1);
            orthogonalize_against(w, Q, j + 1);
            if (deflate) orthogonalize_against(w, *deflate, ndefl);
            bj = norm2(w);
            for (index_t i = 0; i <= j; ++i) omega_next[i] = kEps;
            omega_next[j + 1] = 1.0;
            reorth_next = !opts.full_reorth;
        }

        if (bj <= 64.0 * kEps * scale) {
            // invariant subspace found; restart with a fresh direction
            beta.push_back(0.0);
            m = j + 1;
            if (m >= m_cap) break;
            fresh_vector(std::span<double>(Q.col(j + 1), n), j + 1);
            std::fill(omega_next.begin(), omega_next.end(), kEps);
            omega_next[j + 1] = 1.0;
        } else {
            beta.push_back(bj);
            beta_max = std::max(beta_max, bj);
            double* qn = Q.col(j + 1);
            for (index_t i = 0; i < n; ++i) qn[i] = w[i] / bj;
            m = j + 1;
        }
        std::swap(omega_prev, omega_cur);
        std::swap(omega_cur, omega_next);

        if (m >= want && (m % opts.check_interval == 0 || m == m_cap)) {
            TridiagEig te = eig_tridiag(alpha, beta, m);
            if (top_converged(te, beta[m - 1])) {
                converged = true;
                break;
            }
        }
    }

    TridiagEig te = eig_tridiag(alpha, beta, m);
    RitzSpectrum out;
    out.k = k;
    out.steps = m;
    out.converged = converged;
    out.min_value = te.values.front();
    const index_t nv = std::min<index_t>(want, m);
    out.values.resize(nv);
    out.residuals.resize(nv);
    const index_t kv = std::min<index_t>(k, m);
    out.vectors = DenseTallMatrix(n, kv);
    const double btail = beta[m - 1];
    for (index_t i = 0; i < nv; ++i) {
        out.values[i] = te.values[m - 1 - i];
        out.residuals[i] = std::abs(btail * te.vectors(m - 1, m - 1 - i));
    }
    for (index_t c = 0; c < kv; ++c) {
        double* z = out.vectors.col(c);
        std::fill(z, z + n, 0.0);
        for (index_t j = 0; j < m; ++j) {
            axpy(te.vectors(j, m - 1 - c), std::span<const double>(Q.col(j), n),
                 std::span<double>(z, n));
        }
    }
    // squeeze out rounding-level drift so downstream orthonormality holds tightly
    for (int pass = 0; pass < 2; ++pass) {
        for (index_t c = 0; c < kv; ++c) {
            std::span<double> z(out.vectors.col(c), n);
            orthogonalize_against(z, out.vectors, c);
            const double nrm = norm2(z);
            if (nrm > 0.0) scal(1.0 / nrm, z);
        }
    }
    return out;
}

}  // namespace slr
