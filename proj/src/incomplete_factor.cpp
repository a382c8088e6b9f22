#include "slr/incomplete_factor.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slr {

BreakdownError::BreakdownError(FactorKind kind, index_t pi, double pv)
    : std::runtime_error((kind == FactorKind::ICT ? std::string("ict_factor: nonpositive pivot at index ")
                                                  : std::string("ildlt_factor: zero pivot at index ")) +
                         std::to_string(pi)),
      pivot_index(pi),
      pivot_value(pv) {}

std::vector<index_t> fill_reducing_order(const SymSparseMatrix& A) {
    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(2 * A.values.size());
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const int j = static_cast<int>(A.col_idx[k]);
            trip.emplace_back(static_cast<int>(i), j, 1.0);
            if (j != static_cast<int>(i)) trip.emplace_back(j, static_cast<int>(i), 1.0);
        }
    }
    SpMat full(static_cast<int>(A.n), static_cast<int>(A.n));
    full.setFromTriplets(trip.begin(), trip.end());
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P;
    amd(full.selfadjointView<Eigen::Lower>(), P);
    // P is built so that P A P^T has reduced fill; P.indices()[old] = new.
    std::vector<index_t> perm(A.n);
    for (index_t i = 0; i < A.n; ++i) perm[i] = P.indices()[static_cast<int>(i)];
    return perm;
}

namespace {

// CSC lower triangle of P A P^T (rows >= col within each column, sorted).
struct LowerCsc {
    index_t n;
    std::vector<index_t> ptr, row;
    std::vector<double> val;
};

LowerCsc permuted_lower_csc(const SymSparseMatrix& A, const std::vector<index_t>& perm) {
    LowerCsc M;
    M.n = A.n;
    struct E {
        index_t r, c;
        double v;
    };
    std::vector<E> es;
    es.reserve(A.values.size());
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            index_t r = perm[i], c = perm[A.col_idx[k]];
            if (r < c) std::swap(r, c);
            es.push_back({r, c, A.values[k]});
        }
    }
    std::sort(es.begin(), es.end(), [](const E& a, const E& b) {
        return a.c != b.c ? a.c < b.c : a.r < b.r;
    });
    M.ptr.assign(A.n + 1, 0);
    M.row.resize(es.size());
    M.val.resize(es.size());
    for (std::size_t k = 0; k < es.size(); ++k) {
        ++M.ptr[es[k].c + 1];
        M.row[k] = es[k].r;
        M.val[k] = es[k].v;
    }
    for (index_t j = 0; j < A.n; ++j) M.ptr[j + 1] += M.ptr[j];
    return M;
}

index_t symbolic_fill(const LowerCsc& M) {
    const index_t n = M.n;
    std::vector<std::vector<index_t>> pattern(n);  // off-diagonal rows per column
    std::vector<std::vector<index_t>> children(n);
    std::vector<index_t> mark(n, -1);
    index_t fill = 0;
    for (index_t j = 0; j < n; ++j) {
        std::vector<index_t> rows;
        for (index_t k = M.ptr[j]; k < M.ptr[j + 1]; ++k) {
            const index_t r = M.row[k];
            if (r > j && mark[r] != j) {
                mark[r] = j;
                rows.push_back(r);
            }
        }
        for (index_t c : children[j]) {
            for (index_t r : pattern[c]) {
                if (r > j && mark[r] != j) {
                    mark[r] = j;
                    rows.push_back(r);
                }
            }
            pattern[c].clear();
            pattern[c].shrink_to_fit();
        }
        fill += static_cast<index_t>(rows.size()) + 1;
        if (!rows.empty()) {
            const index_t parent = *std::min_element(rows.begin(), rows.end());
            children[parent].push_back(j);
            pattern[j] = std::move(rows);
        }
    }
    return fill;
}

struct WorkEntry {
    double absval;
    index_t row;
};

// Shared left-looking driver for ICT (with_d = false) and ILDLT (with_d = true).
IncompleteFactor factor_impl(const SymSparseMatrix& A, FactorOptions opts, bool with_d) {
    IncompleteFactor F;
    F.kind = with_d ? FactorKind::ILDLT : FactorKind::ICT;
    F.n = A.n;
    F.droptol = opts.droptol;
    if (opts.use_fill_ordering) {
        F.perm = fill_reducing_order(A);
    } else {
        F.perm.resize(A.n);
        std::iota(F.perm.begin(), F.perm.end(), 0);
    }
    const index_t n = A.n;
    LowerCsc M = permuted_lower_csc(A, F.perm);

    if (!with_d) {
        for (index_t j = 0; j < n; ++j) {
            bool has_diag = false;
            for (index_t k = M.ptr[j]; k < M.ptr[j + 1]; ++k) has_diag |= M.row[k] == j;
            if (!has_diag) throw std::invalid_argument("ict_factor: missing diagonal entry");
        }
    }

    F.col_ptr.assign(n + 1, 0);
    if (with_d) F.D.assign(n, 0.0);
    const index_t cap = opts.max_fill < 0 ? n : opts.max_fill;

    std::vector<double> w(n, 0.0);
    std::vector<index_t> marked(n, -1);
    std::vector<index_t> active;                // rows with nonzero w this column
    std::vector<index_t> head(n, -1), link(n, -1), cursor(n, 0);
    std::vector<WorkEntry> keep;

    for (index_t j = 0; j < n; ++j) {
        active.clear();
        auto touch = [&](index_t r) {
            if (marked[r] != j) {
                marked[r] = j;
                w[r] = 0.0;
                active.push_back(r);
            }
        };
        for (index_t k = M.ptr[j]; k < M.ptr[j + 1]; ++k) {
            touch(M.row[k]);
            w[M.row[k]] += M.val[k];
        }
        touch(j);

        // pull updates from every earlier column whose next row is j
        for (index_t k = head[j]; k != -1;) {
            const index_t knext = link[k];
            const index_t pos = cursor[k];
            const double ljk = F.val[pos];
            const double mult = with_d ? ljk * F.D[k] : ljk;
            for (index_t t = pos; t < F.col_ptr[k + 1]; ++t) {
                const index_t r = F.row_idx[t];
                touch(r);
                w[r] -= mult * F.val[t];
            }
            if (pos + 1 < F.col_ptr[k + 1]) {
                cursor[k] = pos + 1;
                const index_t r = F.row_idx[pos + 1];
                link[k] = head[r];
                head[r] = k;
            }
            k = knext;
        }

        double colnorm2 = 0.0;
        for (index_t r : active) colnorm2 += w[r] * w[r];
        const double tau = opts.droptol * std::sqrt(colnorm2);

        double pivot = w[j];
        const bool bad = with_d ? pivot == 0.0 || std::abs(pivot) < 1e-14 * std::sqrt(colnorm2)
                                : pivot <= 0.0;
        if (bad) {
            if (opts.strict) throw BreakdownError(F.kind, j, pivot);
            double mag = std::max(tau, 1e-12 * std::sqrt(colnorm2));
            if (mag == 0.0) mag = 1.0;
            pivot = (with_d && pivot < 0.0) ? -mag : mag;
            ++F.perturbations;
        }

        keep.clear();
        for (index_t r : active) {
            if (r <= j) continue;
            const double a = std::abs(w[r]);
            if (a == 0.0 || a < tau) continue;
            keep.push_back({a, r});
        }
        if (static_cast<index_t>(keep.size()) > cap) {
            std::nth_element(keep.begin(), keep.begin() + cap, keep.end(),
                             [](const WorkEntry& a, const WorkEntry& b) {
                                 return a.absval != b.absval ? a.absval > b.absval : a.row < b.row;
                             });
            keep.resize(cap);
        }
        std::sort(keep.begin(), keep.end(),
                  [](const WorkEntry& a, const WorkEntry& b) { return a.row < b.row; });

        const index_t col_start = static_cast<index_t>(F.val.size());
        if (with_d) {
            F.D[j] = pivot;
            for (const auto& e : keep) {
                F.row_idx.push_back(e.row);
                F.val.push_back(w[e.row] / pivot);
            }
        } else {
            const double ljj = std::sqrt(pivot);
            F.row_idx.push_back(j);
            F.val.push_back(ljj);
            for (const auto& e : keep) {
                F.row_idx.push_back(e.row);
                F.val.push_back(w[e.row] / ljj);
            }
        }
        F.col_ptr[j + 1] = static_cast<index_t>(F.val.size());

        const index_t first_off = col_start + (with_d ? 0 : 1);
        if (first_off < F.col_ptr[j + 1]) {
            cursor[j] = first_off;
            const index_t r = F.row_idx[first_off];
            link[j] = head[r];
            head[r] = j;
        }
    }
    return F;
}

}  // namespace

index_t symbolic_cholesky_fill(const SymSparseMatrix& A, const std::vector<index_t>& perm) {
    return symbolic_fill(permuted_lower_csc(A, perm));
}

IncompleteFactor ict_factor(const SymSparseMatrix& A, const FactorOptions& opts) {
    return factor_impl(A, opts, false);
}

IncompleteFactor ildlt_factor(const SymSparseMatrix& A, const FactorOptions& opts) {
    return factor_impl(A, opts, true);
}

void IncompleteFactor::solve(std::span<const double> b, std::span<double> x) const {
    if (static_cast<index_t>(b.size()) != n || static_cast<index_t>(x.size()) != n) {
        throw std::invalid_argument("factor_solve: dimension mismatch");
    }
    DenseVector y(n);
    for (index_t i = 0; i < n; ++i) y[perm[i]] = b[i];
    if (kind == FactorKind::ICT) {
        for (index_t j = 0; j < n; ++j) {
            const index_t d = col_ptr[j];
            const double xj = y[j] / val[d];
            y[j] = xj;
            for (index_t k = d + 1; k < col_ptr[j + 1]; ++k) y[row_idx[k]] -= val[k] * xj;
        }
        for (index_t j = n - 1; j >= 0; --j) {
            const index_t d = col_ptr[j];
            double s = y[j];
            for (index_t k = d + 1; k < col_ptr[j + 1]; ++k) s -= val[k] * y[row_idx[k]];
            y[j] = s / val[d];
        }
    } else {
        for (index_t j = 0; j < n; ++j) {
            const double xj = y[j];
            for (index_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) y[row_idx[k]] -= val[k] * xj;
        }
        for (index_t j = 0; j < n; ++j) y[j] /= D[j];
        for (index_t j = n - 1; j >= 0; --j) {
            double s = y[j];
            for (index_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) s -= val[k] * y[row_idx[k]];
            y[j] = s;
        }
    }
    for (index_t i = 0; i < n; ++i) x[i] = y[perm[i]];
}

DenseVector IncompleteFactor::solve(const DenseVector& b) const {
    DenseVector x(n);
    solve(std::span<const double>(b), std::span<double>(x));
    return x;
}

void IncompleteFactor::solve_lower(std::span<const double> b, std::span<double> y) const {
    for (index_t i = 0; i < n; ++i) y[perm[i]] = b[i];
    for (index_t j = 0; j < n; ++j) {
        const index_t d = col_ptr[j];
        const double xj = y[j] / val[d];
        y[j] = xj;
        for (index_t k = d + 1; k < col_ptr[j + 1]; ++k) y[row_idx[k]] -= val[k] * xj;
    }
}

void IncompleteFactor::solve_lower_transpose(std::span<const double> yin, std::span<double> x) const {
    DenseVector y(yin.begin(), yin.end());
    for (index_t j = n - 1; j >= 0; --j) {
        const index_t d = col_ptr[j];
        double s = y[j];
        for (index_t k = d + 1; k < col_ptr[j + 1]; ++k) s -= val[k] * y[row_idx[k]];
        y[j] = s / val[d];
    }
    for (index_t i = 0; i < n; ++i) x[i] = y[perm[i]];
}

}  // namespace slr
