#include "slr/decomposition.hpp"

#include <algorithm>
#include <stdexcept>

namespace slr {

void SparseBlock::matvec(std::span<const double> x, std::span<double> y) const {
    for (index_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
        y[i] = s;
    }
}

void SparseBlock::matvec_transpose_add(std::span<const double> x, std::span<double> y) const {
    for (index_t i = 0; i < rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) y[col_idx[k]] += values[k] * xi;
    }
}

DomainDecomposition build_dd(const SymSparseMatrix& A, const PartitionLabels& labels) {
    if (auto err = validate_labels(A, labels); !err.empty()) {
        throw std::invalid_argument("build_dd: inconsistent labels: " + err);
    }
    DomainDecomposition dd;
    dd.n = A.n;
    dd.p = labels.p;

    // new ordering: interiors grouped by subdomain (ascending original index),
    // then interface ordered by (owning subdomain, original index)
    std::vector<index_t> interior_count(dd.p, 0);
    for (index_t v = 0; v < A.n; ++v) {
        if (!labels.interface[v]) ++interior_count[labels.subdomain[v]];
    }
    dd.interior_start.assign(dd.p + 1, 0);
    for (index_t d = 0; d < dd.p; ++d) dd.interior_start[d + 1] = dd.interior_start[d] + interior_count[d];
    dd.s = A.n - dd.interior_start[dd.p];

    dd.perm.assign(A.n, -1);
    dd.inv_perm.assign(A.n, -1);
    std::vector<index_t> next(dd.interior_start.begin(), dd.interior_start.end() - 1);
    index_t next_iface = dd.interior_start[dd.p];
    for (index_t d = 0; d < dd.p; ++d) {
        for (index_t v = 0; v < A.n; ++v) {
            if (labels.subdomain[v] != d) continue;
            if (labels.interface[v]) {
                dd.perm[v] = next_iface++;
            } else {
                dd.perm[v] = next[d]++;
            }
        }
    }
    for (index_t v = 0; v < A.n; ++v) dd.inv_perm[dd.perm[v]] = v;

    // scatter the stored lower entries into blocks (using new indices)
    const index_t ni = dd.interior_total();
    std::vector<std::vector<Triplet>> btrip(dd.p);
    std::vector<std::vector<Triplet>> etrip(dd.p);
    std::vector<Triplet> ctrip;
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            const double v = A.values[k];
            index_t pi = dd.perm[i], pj = dd.perm[j];
            if (pi < pj) std::swap(pi, pj);   // lower in the new ordering
            if (pi < ni) {
                const index_t d = labels.subdomain[i];
                btrip[d].push_back({pi - dd.interior_start[d], pj - dd.interior_start[d], v});
            } else if (pj < ni) {
                const index_t d = labels.subdomain[dd.inv_perm[pj]];
                etrip[d].push_back({pj - dd.interior_start[d], pi - ni, v});
            } else {
                ctrip.push_back({pi - ni, pj - ni, v});
            }
        }
    }
    dd.B.resize(dd.p);
    dd.E.resize(dd.p);
    for (index_t d = 0; d < dd.p; ++d) {
        dd.B[d] = sym_from_lower_triplets(interior_count[d], std::move(btrip[d]));
        SparseBlock& E = dd.E[d];
        E.rows = interior_count[d];
        E.cols = dd.s;
        auto& t = etrip[d];
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        E.row_ptr.assign(E.rows + 1, 0);
        for (const auto& e : t) ++E.row_ptr[e.row + 1];
        for (index_t r = 0; r < E.rows; ++r) E.row_ptr[r + 1] += E.row_ptr[r];
        E.col_idx.resize(t.size());
        E.values.resize(t.size());
        for (std::size_t m = 0; m < t.size(); ++m) {
            E.col_idx[m] = t[m].col;
            E.values[m] = t[m].value;
        }
    }
    dd.C = sym_from_lower_triplets(dd.s, std::move(ctrip));
    return dd;
}

SymSparseMatrix reassemble(const DomainDecomposition& dd) {
    std::vector<Triplet> trip;
    const index_t ni = dd.interior_total();
    for (index_t d = 0; d < dd.p; ++d) {
        const index_t off = dd.interior_start[d];
        const auto& B = dd.B[d];
        for (index_t i = 0; i < B.n; ++i) {
            for (index_t k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k) {
                index_t oi = dd.inv_perm[off + i], oj = dd.inv_perm[off + B.col_idx[k]];
                if (oi < oj) std::swap(oi, oj);
                trip.push_back({oi, oj, B.values[k]});
            }
        }
        const auto& E = dd.E[d];
        for (index_t i = 0; i < E.rows; ++i) {
            for (index_t k = E.row_ptr[i]; k < E.row_ptr[i + 1]; ++k) {
                index_t oi = dd.inv_perm[off + i], oj = dd.inv_perm[ni + E.col_idx[k]];
                if (oi < oj) std::swap(oi, oj);
                trip.push_back({oi, oj, E.values[k]});
            }
        }
    }
    for (index_t i = 0; i < dd.C.n; ++i) {
        for (index_t k = dd.C.row_ptr[i]; k < dd.C.row_ptr[i + 1]; ++k) {
            index_t oi = dd.inv_perm[ni + i], oj = dd.inv_perm[ni + dd.C.col_idx[k]];
            if (oi < oj) std::swap(oi, oj);
            trip.push_back({oi, oj, dd.C.values[k]});
        }
    }
    return sym_from_lower_triplets(dd.n, std::move(trip));
}

void permute_to_blocks(const DomainDecomposition& dd, std::span<const double> x, std::span<double> xp) {
    for (index_t v = 0; v < dd.n; ++v) xp[dd.perm[v]] = x[v];
}

void permute_from_blocks(const DomainDecomposition& dd, std::span<const double> xp, std::span<double> x) {
    for (index_t v = 0; v < dd.n; ++v) x[v] = xp[dd.perm[v]];
}

}  // namespace slr
