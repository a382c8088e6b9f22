#include "slr/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace slr {

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double true_relres(const SymSparseMatrix& A, const DenseVector& b, const DenseVector& x, double bnorm) {
    DenseVector r = sym_matvec(A, x);
    for (index_t i = 0; i < A.n; ++i) r[i] = b[i] - r[i];
    return bnorm > 0.0 ? norm2(r) / bnorm : norm2(r);
}

}  // namespace

void SolveReport::write_history(std::ostream& out) const {
    out << "iteration,relres\n";
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12e\n", i, history[i]);
        out << buf;
    }
}

SolveReport pcg(const SymSparseMatrix& A, const DenseVector& b, DenseVector& x, const PrecondFn& M,
                double tol, index_t maxit) {
    if (static_cast<index_t>(b.size()) != A.n) throw std::invalid_argument("pcg: rhs size mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    const index_t n = A.n;
    x.assign(n, 0.0);
    SolveReport rep;
    const double bnorm = norm2(b);
    rep.history.push_back(1.0);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.history.back() = 0.0;
        rep.iter_seconds = elapsed(t0);
        return rep;
    }
    DenseVector r = b, z(n), p(n), q(n);
    if (M) {
        M(r, z);
    } else {
        z = r;
    }
    p = z;
    double rho = dot(r, z);
    for (index_t it = 1; it <= maxit; ++it) {
        sym_matvec(A, p, q);
        const double pq = dot(p, q);
        if (pq <= 0.0) {
            throw std::runtime_error("pcg: indefiniteness detected (p^T A p <= 0 at iteration " +
                                     std::to_string(it) + ")");
        }
        const double alpha = rho / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        const double relres = norm2(r) / bnorm;
        rep.history.push_back(relres);
        rep.iterations = it;
        if (relres <= tol) {
            rep.converged = true;
            break;
        }
        if (M) {
            M(r, z);
        } else {
            z = r;
        }
        const double rho_new = dot(r, z);
        const double beta = rho_new / rho;
        rho = rho_new;
        for (index_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rep.final_relres = true_relres(A, b, x, bnorm);
    rep.iter_seconds = elapsed(t0);
    return rep;
}

SolveReport gmres(const SymSparseMatrix& A, const DenseVector& b, DenseVector& x, const PrecondFn& M,
                  index_t restart, double tol, index_t maxit) {
    if (static_cast<index_t>(b.size()) != A.n) throw std::invalid_argument("gmres: rhs size mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    const index_t n = A.n;
    const index_t m = std::max<index_t>(1, restart);
    x.assign(n, 0.0);
    SolveReport rep;
    const double bnorm = norm2(b);
    rep.history.push_back(1.0);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.history.back() = 0.0;
        rep.iter_seconds = elapsed(t0);
        return rep;
    }

    DenseTallMatrix V(n, m + 1);
    std::vector<DenseVector> H(m, DenseVector(m + 1, 0.0));   // H[j][i], column j
    DenseVector cs(m), sn(m), g(m + 1), w(n), t(n);
    index_t total_it = 0;

    while (total_it < maxit) {
        // r = b - A x
        sym_matvec(A, x, w);
        for (index_t i = 0; i < n; ++i) w[i] = b[i] - w[i];
        double beta = norm2(w);
        if (beta / bnorm <= tol) {
            rep.converged = true;
            break;
        }
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        double* v0 = V.col(0);
        for (index_t i = 0; i < n; ++i) v0[i] = w[i] / beta;

        index_t j = 0;
        bool breakdown = false;
        for (; j < m && total_it < maxit; ++j) {
            std::span<const double> vj(V.col(j), n);
            if (M) {
                M(vj, t);
            } else {
                std::copy(vj.begin(), vj.end(), t.begin());
            }
            sym_matvec(A, t, w);
            for (index_t i = 0; i <= j; ++i) {
                std::span<const double> vi(V.col(i), n);
                H[j][i] = dot(w, vi);
                axpy(-H[j][i], vi, w);
            }
            const double hnext = norm2(w);
            H[j][j + 1] = hnext;

            // apply accumulated Givens rotations, then form the new one
            for (index_t i = 0; i < j; ++i) {
                const double tmp = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
                H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
                H[j][i] = tmp;
            }
            const double denom = std::hypot(H[j][j], H[j][j + 1]);
            if (denom == 0.0) {
                breakdown = true;   // dead column; solve with the ones before it
                ++total_it;
                rep.iterations = total_it;
                rep.history.push_back(rep.history.back());
                break;
            }
            cs[j] = H[j][j] / denom;
            sn[j] = H[j][j + 1] / denom;
            H[j][j] = denom;
            H[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            ++total_it;
            rep.iterations = total_it;
            const double relres = std::abs(g[j + 1]) / bnorm;
            rep.history.push_back(relres);

            if (hnext <= 1e-14 * bnorm) {
                breakdown = true;   // invariant subspace: solution is exact in it
                ++j;
                break;
            }
            if (relres <= tol) {
                ++j;
                break;
            }
            double* vnext = V.col(j + 1);
            for (index_t i = 0; i < n; ++i) vnext[i] = w[i] / hnext;
        }

        // back substitution for y, then x += M(V y)
        if (j > 0) {
            DenseVector y(j, 0.0);
            for (index_t i = j - 1; i >= 0; --i) {
                double s = g[i];
                for (index_t l = i + 1; l < j; ++l) s -= H[l][i] * y[l];
                y[i] = s / H[i][i];
            }
            std::fill(w.begin(), w.end(), 0.0);
            for (index_t l = 0; l < j; ++l) axpy(y[l], std::span<const double>(V.col(l), n), w);
            if (M) {
                M(w, t);
            } else {
                t = w;
            }
            axpy(1.0, t, x);
        }
        const double relres = true_relres(A, b, x, bnorm);
        if (relres <= tol || breakdown) {
            rep.converged = relres <= tol;
            if (!rep.history.empty()) rep.history.back() = relres;
            break;
        }
    }
    rep.final_relres = true_relres(A, b, x, bnorm);
    if (rep.history.size() == 1 && rep.converged) rep.history[0] = rep.final_relres;
    rep.iter_seconds = elapsed(t0);
    return rep;
}

}  // namespace slr
