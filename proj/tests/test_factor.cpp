#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "slr/incomplete_factor.hpp"
#include "slr/model_problems.hpp"

using namespace slr;

namespace {

SymSparseMatrix diag_matrix(std::initializer_list<double> d) {
    std::vector<Triplet> t;
    index_t i = 0;
    for (double v : d) {
        t.push_back({i, i, v});
        ++i;
    }
    return sym_from_lower_triplets(i, std::move(t));
}

std::vector<index_t> identity_perm(index_t n) {
    std::vector<index_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// Dense reconstruction of the factorization residual ||F F^T - A|| / ||A||
// in the factor's own ordering (P A P^T).
double factor_residual(const IncompleteFactor& F, const SymSparseMatrix& A) {
    const index_t n = A.n;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (index_t j = 0; j < n; ++j) {
        if (F.kind == FactorKind::ILDLT) L(j, j) = 1.0;
        for (index_t k = F.col_ptr[j]; k < F.col_ptr[j + 1]; ++k) L(F.row_idx[k], j) = F.val[k];
    }
    Eigen::MatrixXd rebuilt;
    if (F.kind == FactorKind::ICT) {
        rebuilt = L * L.transpose();
    } else {
        Eigen::VectorXd D(n);
        for (index_t j = 0; j < n; ++j) D(j) = F.D[j];
        rebuilt = L * D.asDiagonal() * L.transpose();
    }
    Eigen::MatrixXd Ad = test::to_dense(A);
    Eigen::MatrixXd Ap(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < n; ++j) Ap(F.perm[i], F.perm[j]) = Ad(i, j);
    }
    return test::rel_frobenius_diff(rebuilt, Ap);
}

double solve_residual(const SymSparseMatrix& A, const IncompleteFactor& F, const DenseVector& b) {
    DenseVector x = F.solve(b);
    DenseVector r = sym_matvec(A, x);
    for (index_t i = 0; i < A.n; ++i) r[i] = b[i] - r[i];
    return norm2(r) / norm2(b);
}

}  // namespace

TEST_CASE("fill_reducing_order returns a permutation; diagonal accepts identity") {
    SymSparseMatrix D = diag_matrix({1, 2, 3, 4});
    std::vector<index_t> p = fill_reducing_order(D);
    std::vector<index_t> seen(4, 0);
    for (index_t v : p) seen[v] += 1;
    CHECK(std::all_of(seen.begin(), seen.end(), [](index_t c) { return c == 1; }));
    CHECK(symbolic_cholesky_fill(D, identity_perm(4)) == 4);
}

TEST_CASE("tridiagonal stays no-fill") {
    std::vector<Triplet> t;
    const index_t n = 40;
    for (index_t i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, -1.0});
        t.push_back({i, i, 2.0});
    }
    SymSparseMatrix T = sym_from_lower_triplets(n, std::move(t));
    const index_t natural = symbolic_cholesky_fill(T, identity_perm(n));
    CHECK(natural == 2 * n - 1);
    CHECK(symbolic_cholesky_fill(T, fill_reducing_order(T)) <= natural);
}

TEST_CASE("minimum-degree ordering beats natural order on grids") {
    SymSparseMatrix A16 = gen_laplacian_2d(16, 16, 0.0);
    const index_t nat16 = symbolic_cholesky_fill(A16, identity_perm(A16.n));
    const index_t md16 = symbolic_cholesky_fill(A16, fill_reducing_order(A16));
    CHECK(md16 < nat16);

    SymSparseMatrix A32 = gen_laplacian_2d(32, 32, 0.0);
    const index_t nat32 = symbolic_cholesky_fill(A32, identity_perm(A32.n));
    const index_t md32 = symbolic_cholesky_fill(A32, fill_reducing_order(A32));
    CHECK(md32 <= 3 * nat32);   // quality target
    CHECK(md32 < nat32);
}

TEST_CASE("ict of a scaled identity") {
    SymSparseMatrix A = diag_matrix({4, 4});
    IncompleteFactor F = ict_factor(A);
    CHECK(F.val[F.col_ptr[0]] == doctest::Approx(2.0));
    CHECK(F.val[F.col_ptr[1]] == doctest::Approx(2.0));
    DenseVector x = F.solve(DenseVector{4, 8});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("exact ict reproduces the Cholesky factorization") {
    SymSparseMatrix A = gen_laplacian_2d(8, 8, 0.0);
    IncompleteFactor F = ict_factor(A);   // droptol 0, unlimited fill
    CHECK(factor_residual(F, A) < 1e-12);
    CHECK(F.perturbations == 0);
}

TEST_CASE("exactness limit holds up to order 200") {
    SymSparseMatrix R = test::random_sparse_spd(200, 0.03, 17);
    IncompleteFactor F = ict_factor(R);
    CHECK(factor_residual(F, R) < 1e-12);
    SymSparseMatrix G = gen_laplacian_3d(5, 5, 5, 0.0);
    CHECK(factor_residual(ict_factor(G), G) < 1e-12);
}

TEST_CASE("ict with dropping stays finite and records fill") {
    SymSparseMatrix R = test::random_sparse_spd(300, 0.04, 21);
    FactorOptions o;
    o.droptol = 1e-3;
    IncompleteFactor F = ict_factor(R, o);
    CHECK(F.nnz() > 0);
    CHECK(F.nnz() <= ict_factor(R).nnz());
    DenseVector b = test::random_vector(R.n, 3);
    DenseVector x = F.solve(b);
    for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("per-column fill cap is honored") {
    SymSparseMatrix R = test::random_sparse_spd(120, 0.2, 23);
    FactorOptions o;
    o.droptol = 0.0;
    o.max_fill = 5;
    IncompleteFactor F = ict_factor(R, o);
    for (index_t j = 0; j < F.n; ++j) {
        CHECK(F.col_ptr[j + 1] - F.col_ptr[j] <= 6);   // diagonal + cap
    }
}

TEST_CASE("ildlt of an indefinite diagonal") {
    SymSparseMatrix A = diag_matrix({1, -1});
    FactorOptions o;
    o.use_fill_ordering = false;
    IncompleteFactor F = ildlt_factor(A, o);
    CHECK(F.D[0] == doctest::Approx(1.0));
    CHECK(F.D[1] == doctest::Approx(-1.0));
    CHECK(F.col_ptr[2] == 0);   // L strictly diagonal here
}

TEST_CASE("exact ildlt on an indefinite shifted Laplacian") {
    SymSparseMatrix A = gen_laplacian_2d(8, 8, 0.4);   // 0.05 * 8 shift: indefinite
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(test::to_dense(A));
    REQUIRE(es.eigenvalues().minCoeff() < 0.0);
    IncompleteFactor F = ildlt_factor(A);
    CHECK(factor_residual(F, A) < 1e-12);
    bool has_negative = false;
    for (double d : F.D) has_negative |= d < 0.0;
    CHECK(has_negative);

    FactorOptions o;
    o.droptol = 1e-3;
    IncompleteFactor G = ildlt_factor(A, o);
    DenseVector b = test::random_vector(A.n, 9);
    DenseVector x = G.solve(b);
    for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("factor_solve on the known tridiagonal inverse") {
    std::vector<Triplet> t{{0, 0, 2}, {1, 0, -1}, {1, 1, 2}, {2, 1, -1}, {2, 2, 2}};
    SymSparseMatrix T = sym_from_lower_triplets(3, std::move(t));
    IncompleteFactor F = ict_factor(T);
    DenseVector x = F.solve(DenseVector{1, 0, 0});
    CHECK(x[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(0.50).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("solve residual decreases with droptol (nonstrict)") {
    SymSparseMatrix A = gen_laplacian_2d(16, 16, 0.0);
    DenseVector b = test::random_vector(A.n, 31);
    double prev = -1.0;
    for (double dt : {1e-1, 1e-2, 1e-3}) {
        FactorOptions o;
        o.droptol = dt;
        const double r = solve_residual(A, ict_factor(A, o), b);
        if (prev >= 0.0) CHECK(r <= prev * (1.0 + 1e-9));
        prev = r;
    }
}

TEST_CASE("factor_solve is linear") {
    SymSparseMatrix A = gen_laplacian_2d(10, 10, 0.0);
    FactorOptions o;
    o.droptol = 1e-2;
    IncompleteFactor F = ict_factor(A, o);
    DenseVector b1 = test::random_vector(A.n, 41), b2 = test::random_vector(A.n, 42);
    const double al = 0.7, be = -2.3;
    DenseVector mix(A.n);
    for (index_t i = 0; i < A.n; ++i) mix[i] = al * b1[i] + be * b2[i];
    DenseVector x1 = F.solve(b1), x2 = F.solve(b2), xm = F.solve(mix);
    double scale = 0.0, err = 0.0;
    for (index_t i = 0; i < A.n; ++i) {
        const double want = al * x1[i] + be * x2[i];
        err = std::max(err, std::abs(xm[i] - want));
        scale = std::max(scale, std::abs(want));
    }
    CHECK(err <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("factor_solve rejects dimension mismatch") {
    IncompleteFactor F = ict_factor(diag_matrix({4, 4}));
    DenseVector b(3), x(2);
    CHECK_THROWS_AS(F.solve(std::span<const double>(b), std::span<double>(x)),
                    std::invalid_argument);
}

TEST_CASE("strict mode reports breakdown with the pivot index") {
    SymSparseMatrix A = diag_matrix({1, -1});
    FactorOptions o;
    o.strict = true;
    o.use_fill_ordering = false;
    try {
        ict_factor(A, o);
        FAIL("expected BreakdownError");
    } catch (const BreakdownError& e) {
        CHECK(e.pivot_index == 1);
        CHECK(e.pivot_value <= 0.0);
    }
    FactorOptions soft;
    soft.use_fill_ordering = false;
    IncompleteFactor F = ict_factor(A, soft);
    CHECK(F.perturbations >= 1);
    for (double v : F.solve(DenseVector{1, 1})) CHECK(std::isfinite(v));
}

TEST_CASE("ildlt strict mode throws on an exactly singular pivot") {
    std::vector<Triplet> t{{0, 0, 0.0}};
    SymSparseMatrix Z = sym_from_lower_triplets(1, std::move(t));
    FactorOptions o;
    o.strict = true;
    o.use_fill_ordering = false;
    CHECK_THROWS_AS(ildlt_factor(Z, o), BreakdownError);
}
