#include "slr/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slr {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void fail(const std::string& name, const std::string& what) {
    throw std::runtime_error("matrix market: " + name + ": " + what);
}

}  // namespace

SymSparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("matrix market: cannot open '" + path + "'");
    return read_matrix_market(in, path);
}

SymSparseMatrix read_matrix_market(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) fail(name, "empty file");
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") fail(name, "malformed header banner");
    if (lower(object) != "matrix" || lower(format) != "coordinate") fail(name, "expected 'matrix coordinate'");
    if (lower(field) != "real") fail(name, "field must be real, got '" + field + "'");
    if (lower(symmetry) != "symmetric") fail(name, "symmetry must be symmetric, got '" + symmetry + "'");

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream dims(line);
    index_t rows = -1, cols = -1, nnz = -1;
    if (!(dims >> rows >> cols >> nnz)) fail(name, "malformed size line");
    if (rows != cols) fail(name, "matrix must be square");
    if (rows < 0 || nnz < 0) fail(name, "negative dimensions");

    // Entries tagged with their original orientation; a pair present in both
    // orientations is rejected after sorting.
    struct Entry {
        index_t r, c;
        double v;
        bool was_upper;
    };
    std::vector<Entry> raw;
    raw.reserve(nnz);
    for (index_t k = 0; k < nnz; ++k) {
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) fail(name, "truncated entry list");
        if (i < 1 || i > rows || j < 1 || j > cols) fail(name, "entry index out of range");
        --i;
        --j;
        if (i >= j) {
            raw.push_back({i, j, v, false});
        } else {
            raw.push_back({j, i, v, true});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    std::vector<Triplet> folded;
    folded.reserve(raw.size());
    for (std::size_t k = 0; k < raw.size();) {
        std::size_t m = k;
        bool saw_lower = false, saw_upper = false;
        double v = 0.0;
        while (m < raw.size() && raw[m].r == raw[k].r && raw[m].c == raw[k].c) {
            (raw[m].was_upper ? saw_upper : saw_lower) = true;
            v += raw[m].v;
            ++m;
        }
        if (saw_lower && saw_upper && raw[k].r != raw[k].c) {
            fail(name, "both (i,j) and (j,i) stored for i!=j; symmetric files keep one triangle");
        }
        folded.push_back({raw[k].r, raw[k].c, v});
        k = m;
    }
    return sym_from_lower_triplets(rows, std::move(folded));
}

void write_matrix_market(const SymSparseMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("matrix market: cannot open '" + path + "' for writing");
    write_matrix_market(A, out);
}

void write_matrix_market(const SymSparseMatrix& A, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << A.n << ' ' << A.n << ' ' << A.nnz_stored() << '\n';
    char buf[64];
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                          static_cast<long long>(i + 1),
                          static_cast<long long>(A.col_idx[k] + 1), A.values[k]);
            out << buf;
        }
    }
}

}  // namespace slr
