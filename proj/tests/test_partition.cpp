#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <queue>
#include <sstream>

#include "oracles.hpp"
#include "slr/decomposition.hpp"
#include "slr/model_problems.hpp"

using namespace slr;

namespace {

// BFS over interiors only; true when interiors of different subdomains connect.
bool interiors_connected_across(const SymSparseMatrix& A, const PartitionLabels& lab) {
    std::vector<std::vector<index_t>> adj(A.n);
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (i == j) continue;
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    std::vector<int> seen(A.n, 0);
    for (index_t v0 = 0; v0 < A.n; ++v0) {
        if (lab.interface[v0] || seen[v0]) continue;
        std::queue<index_t> q;
        q.push(v0);
        seen[v0] = 1;
        while (!q.empty()) {
            const index_t v = q.front();
            q.pop();
            for (index_t u : adj[v]) {
                if (lab.interface[u]) continue;
                if (lab.subdomain[u] != lab.subdomain[v0]) return true;
                if (!seen[u]) {
                    seen[u] = 1;
                    q.push(u);
                }
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("p=1 means all interior") {
    SymSparseMatrix A = gen_laplacian_2d(5, 5, 0.0);
    PartitionLabels lab = partition_graph(A, 1);
    CHECK(lab.p == 1);
    CHECK(lab.interface_size() == 0);
    CHECK(validate_labels(A, lab).empty());
}

TEST_CASE("geometric bisection on 3x5, p=2: middle row separator") {
    PartitionLabels lab = geometric_bisection_grid(3, 5, 2);
    REQUIRE(lab.n() == 15);
    CHECK(lab.interface_size() == 3);
    for (index_t i = 0; i < 3; ++i) {
        CHECK(lab.interface[2 * 3 + i] == 1);   // grid row 2 (1-based row 3)
    }
    index_t lo = 0, hi = 0;
    for (index_t v = 0; v < 15; ++v) {
        if (lab.interface[v]) continue;
        (lab.subdomain[v] == 0 ? lo : hi) += 1;
    }
    CHECK(lo == 6);
    CHECK(hi == 6);
    SymSparseMatrix A = gen_laplacian_2d(3, 5, 0.0);
    CHECK(validate_labels(A, lab).empty());
}

TEST_CASE("geometric bisection p=1 has no separator") {
    PartitionLabels lab = geometric_bisection_grid(4, 4, 1);
    CHECK(lab.interface_size() == 0);
}

TEST_CASE("geometric bisection rejects non powers of two") {
    CHECK_THROWS_AS(geometric_bisection_grid(4, 4, 3), std::invalid_argument);
}

TEST_CASE("geometric bisection 3-D 4x4x4, p=2: separator plane of 16") {
    PartitionLabels lab = geometric_bisection_grid(4, 4, 4, 2);
    CHECK(lab.interface_size() == 16);
    SymSparseMatrix A = gen_laplacian_3d(4, 4, 4, 0.0);
    CHECK(validate_labels(A, lab).empty());
    // plane z = 1
    for (index_t y = 0; y < 4; ++y) {
        for (index_t x = 0; x < 4; ++x) CHECK(lab.interface[(1 * 4 + y) * 4 + x] == 1);
    }
}

TEST_CASE("partition_graph 8x8 p=4: coverage and interface rule") {
    SymSparseMatrix A = gen_laplacian_2d(8, 8, 0.0);
    PartitionLabels lab = partition_graph(A, 4);
    CHECK(validate_labels(A, lab).empty());
    std::vector<index_t> count(4, 0);
    for (index_t v = 0; v < A.n; ++v) {
        REQUIRE(lab.subdomain[v] >= 0);
        REQUIRE(lab.subdomain[v] < 4);
        ++count[lab.subdomain[v]];
    }
    for (index_t q = 0; q < 4; ++q) CHECK(count[q] > 0);
    // interface flag holds exactly for vertices adjacent to another part
    Eigen::MatrixXd D = test::to_dense(A);
    for (index_t v = 0; v < A.n; ++v) {
        bool touches = false;
        for (index_t u = 0; u < A.n; ++u) {
            if (u != v && D(v, u) != 0.0 && lab.subdomain[u] != lab.subdomain[v]) touches = true;
        }
        CHECK(int(lab.interface[v]) == int(touches));
    }
}

TEST_CASE("partition_graph balance on model grids") {
    SymSparseMatrix A = gen_laplacian_2d(32, 32, 0.0);
    for (index_t p : {2, 4, 8}) {
        PartitionLabels lab = partition_graph(A, p);
        std::vector<index_t> count(p, 0);
        for (index_t v = 0; v < A.n; ++v) ++count[lab.subdomain[v]];
        const index_t mx = *std::max_element(count.begin(), count.end());
        const index_t mn = *std::min_element(count.begin(), count.end());
        CHECK(double(mx) <= 1.5 * double(mn));
    }
}

TEST_CASE("interface is a vertex separator (BFS witness)") {
    SymSparseMatrix G = gen_laplacian_2d(8, 8, 0.0);
    for (index_t p : {2, 4}) {
        CHECK_FALSE(interiors_connected_across(G, partition_graph(G, p)));
    }
    SymSparseMatrix R = test::random_sparse_spd(60, 0.08, 5);
    CHECK_FALSE(interiors_connected_across(R, partition_graph(R, 3)));
    CHECK_FALSE(interiors_connected_across(G, geometric_bisection_grid(8, 8, 4)));
}

TEST_CASE("partition_graph rejects p > n") {
    SymSparseMatrix A = gen_laplacian_2d(2, 2, 0.0);
    CHECK_THROWS_AS(partition_graph(A, 5), std::invalid_argument);
}

TEST_CASE("build_dd degenerate single domain") {
    SymSparseMatrix A = gen_laplacian_2d(4, 3, 0.0);
    DomainDecomposition dd = build_dd(A, partition_graph(A, 1));
    CHECK(dd.p == 1);
    CHECK(dd.s == 0);
    CHECK(dd.C.n == 0);
    CHECK(dd.E[0].nnz() == 0);
    CHECK(test::rel_frobenius_diff(test::to_dense(dd.B[0]), test::to_dense(A)) == 0.0);
}

TEST_CASE("build_dd on 8x8 p=2 geometric: C is the separator tridiagonal") {
    SymSparseMatrix A = gen_laplacian_2d(8, 8, 0.0);
    DomainDecomposition dd = build_dd(A, geometric_bisection_grid(8, 8, 2));
    REQUIRE(dd.s == 8);
    Eigen::MatrixXd C = test::to_dense(dd.C);
    for (index_t i = 0; i < 8; ++i) {
        CHECK(C(i, i) == 4.0);   // T_x + 2 I on the separator line
        if (i > 0) {
            CHECK(C(i, i - 1) == -1.0);
        }
    }
    CHECK(C.cwiseAbs().sum() == doctest::Approx(8 * 4 + 14));
}

TEST_CASE("build_dd reassembly is exact") {
    SymSparseMatrix R = test::random_sparse_spd(50, 0.1, 11);
    for (index_t p : {2, 3}) {
        DomainDecomposition dd = build_dd(R, partition_graph(R, p));
        SymSparseMatrix back = reassemble(dd);
        REQUIRE(back.n == R.n);
        REQUIRE(back.row_ptr == R.row_ptr);
        REQUIRE(back.col_idx == R.col_idx);
        for (std::size_t k = 0; k < R.values.size(); ++k) CHECK(back.values[k] == R.values[k]);
    }
    SymSparseMatrix G = gen_laplacian_2d(9, 9, 0.0);
    for (index_t p : {2, 4}) {
        DomainDecomposition dd = build_dd(G, geometric_bisection_grid(9, 9, p));
        SymSparseMatrix back = reassemble(dd);
        REQUIRE(back.col_idx == G.col_idx);
        for (std::size_t k = 0; k < G.values.size(); ++k) CHECK(back.values[k] == G.values[k]);
    }
}

TEST_CASE("build_dd rejects inconsistent labels") {
    SymSparseMatrix A = gen_laplacian_2d(4, 4, 0.0);
    PartitionLabels lab = geometric_bisection_grid(4, 4, 2);
    lab.interface.assign(A.n, 0);   // interiors of different parts now touch
    CHECK_THROWS_AS(build_dd(A, lab), std::invalid_argument);
}

TEST_CASE("interior/interface sizes sum to n and permutation is a bijection") {
    SymSparseMatrix A = gen_laplacian_3d(5, 4, 3, 0.0);
    DomainDecomposition dd = build_dd(A, partition_graph(A, 4));
    index_t tot = dd.s;
    for (index_t d = 0; d < dd.p; ++d) tot += dd.interior_size(d);
    CHECK(tot == A.n);
    std::vector<index_t> seen(A.n, 0);
    for (index_t v = 0; v < A.n; ++v) seen[dd.perm[v]] += 1;
    CHECK(std::all_of(seen.begin(), seen.end(), [](index_t c) { return c == 1; }));
}

TEST_CASE("label dump format") {
    PartitionLabels lab = geometric_bisection_grid(2, 2, 2);
    std::ostringstream os;
    write_labels(lab, os);
    std::istringstream is(os.str());
    index_t v, d, f, rows = 0;
    while (is >> v >> d >> f) ++rows;
    CHECK(rows == 4);
}
