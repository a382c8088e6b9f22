#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "slr/matrix_market.hpp"
#include "slr/model_problems.hpp"

using namespace slr;

namespace {

SymSparseMatrix tridiag(index_t n, double off, double diag) {
    std::vector<Triplet> t;
    for (index_t i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, off});
        t.push_back({i, i, diag});
    }
    return sym_from_lower_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("sym_matvec identity and tridiagonal") {
    SymSparseMatrix I3 = tridiag(3, 0.0, 1.0);
    DenseVector y = sym_matvec(I3, DenseVector{1, 2, 3});
    CHECK(y[0] == doctest::Approx(1));
    CHECK(y[1] == doctest::Approx(2));
    CHECK(y[2] == doctest::Approx(3));

    SymSparseMatrix T = tridiag(3, -1.0, 2.0);
    y = sym_matvec(T, DenseVector{1, 1, 1});
    CHECK(y[0] == doctest::Approx(1));
    CHECK(y[1] == doctest::Approx(0));
    CHECK(y[2] == doctest::Approx(1));
}

TEST_CASE("sym_matvec against dense assembly on a grid column") {
    SymSparseMatrix A = gen_laplacian_2d(4, 4, 0.0);
    Eigen::MatrixXd D = test::to_dense(A);
    DenseVector e1(A.n, 0.0);
    e1[0] = 1.0;
    DenseVector y = sym_matvec(A, e1);
    for (index_t i = 0; i < A.n; ++i) CHECK(y[i] == doctest::Approx(D(i, 0)).epsilon(1e-14));
}

TEST_CASE("sym_matvec agrees with dense matvec on random matrices") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const index_t n = 100 + 130 * seed;
        SymSparseMatrix A = test::random_sparse_spd(n, 0.05, seed);
        Eigen::MatrixXd D = test::to_dense(A);
        DenseVector x = test::random_vector(n, seed + 100);
        DenseVector y = sym_matvec(A, x);
        Eigen::Map<Eigen::VectorXd> xm(x.data(), n);
        Eigen::VectorXd yd = D * xm;
        double num = 0.0, den = 0.0;
        for (index_t i = 0; i < n; ++i) {
            num += (y[i] - yd[i]) * (y[i] - yd[i]);
            den += yd[i] * yd[i];
        }
        CHECK(std::sqrt(num / den) < 1e-13);
    }
}

TEST_CASE("sym_matvec rejects dimension mismatch") {
    SymSparseMatrix T = tridiag(3, -1.0, 2.0);
    DenseVector x(2), y(3);
    CHECK_THROWS_AS(sym_matvec(T, std::span<const double>(x), std::span<double>(y)),
                    std::invalid_argument);
}

TEST_CASE("matrix market: direct transcription") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 3\n"
        "1 1 2\n"
        "2 1 -1\n"
        "2 2 2\n");
    SymSparseMatrix A = read_matrix_market(in);
    CHECK(A.n == 2);
    CHECK(A.lower_entry(0, 0) == 2.0);
    CHECK(A.lower_entry(1, 0) == -1.0);
    CHECK(A.lower_entry(1, 1) == 2.0);
}

TEST_CASE("matrix market: both orientations of one pair rejected") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 4\n"
        "1 1 2\n"
        "2 1 -1\n"
        "1 2 -1\n"
        "2 2 2\n");
    CHECK_THROWS_WITH_AS(read_matrix_market(in), doctest::Contains("one triangle"),
                         std::runtime_error);
}

TEST_CASE("matrix market: header validation") {
    std::istringstream gen(
        "%%MatrixMarket matrix coordinate real general\n"
        "1 1 1\n"
        "1 1 2\n");
    CHECK_THROWS_AS(read_matrix_market(gen), std::runtime_error);
    std::istringstream cx(
        "%%MatrixMarket matrix coordinate complex symmetric\n"
        "1 1 1\n"
        "1 1 2 0\n");
    CHECK_THROWS_AS(read_matrix_market(cx), std::runtime_error);
    std::istringstream bad("%%NotMM nope\n");
    CHECK_THROWS_AS(read_matrix_market(bad), std::runtime_error);
    CHECK_THROWS_AS(read_matrix_market(std::string{"/nonexistent/file.mtx"}), std::runtime_error);
}

TEST_CASE("matrix market: duplicates in one orientation are summed") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 3\n"
        "2 1 -1\n"
        "2 1 -2\n"
        "1 1 5\n");
    SymSparseMatrix A = read_matrix_market(in);
    CHECK(A.lower_entry(1, 0) == -3.0);
}

TEST_CASE("matrix market round-trip is lossless") {
    SymSparseMatrix A = gen_laplacian_3d(5, 5, 5, 0.0);
    // perturb values so 17-digit printing is actually exercised
    SplitMix64 rng(7);
    for (auto& v : A.values) v *= 1.0 + 1e-3 * rng.uniform();
    std::stringstream buf;
    write_matrix_market(A, buf);
    SymSparseMatrix B = read_matrix_market(buf);
    REQUIRE(B.n == A.n);
    REQUIRE(B.row_ptr == A.row_ptr);
    REQUIRE(B.col_idx == A.col_idx);
    for (std::size_t k = 0; k < A.values.size(); ++k) CHECK(B.values[k] == A.values[k]);
}

TEST_CASE("gen_laplacian_2d basics") {
    SymSparseMatrix one = gen_laplacian_2d(1, 1, 0.0);
    CHECK(one.n == 1);
    CHECK(one.lower_entry(0, 0) == 4.0);

    SymSparseMatrix strip = gen_laplacian_2d(3, 1, 0.0);
    Eigen::MatrixXd D = test::to_dense(strip);
    Eigen::MatrixXd T(3, 3);
    T << 4, -1, 0, -1, 4, -1, 0, -1, 4;
    CHECK(test::rel_frobenius_diff(D, T) == 0.0);

    CHECK(gen_laplacian_2d(4, 4, 0.25).lower_entry(0, 0) == doctest::Approx(3.75));
}

TEST_CASE("gen_laplacian_2d spectrum matches the analytic formula") {
    SymSparseMatrix A = gen_laplacian_2d(32, 32, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(test::to_dense(A));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    CHECK(lo > 0.0);
    CHECK(hi < 8.0);
    const double s = std::sin(M_PI / 66.0);
    CHECK(lo == doctest::Approx(4.0 * 2.0 * s * s).epsilon(1e-10));
}

TEST_CASE("gen_laplacian_3d basics and SPD witness") {
    CHECK(gen_laplacian_3d(1, 1, 1, 0.0).lower_entry(0, 0) == 6.0);
    SymSparseMatrix strip = gen_laplacian_3d(3, 1, 1, 0.0);
    CHECK(strip.lower_entry(1, 1) == 6.0);
    CHECK(strip.lower_entry(1, 0) == -1.0);
    CHECK(strip.lower_entry(2, 1) == -1.0);

    SymSparseMatrix A = gen_laplacian_3d(10, 10, 10, 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt(test::to_dense(A));
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("model matrices with zero shift are SPD (quadratic-form witness)") {
    for (const SymSparseMatrix& A :
         {gen_laplacian_2d(13, 7, 0.0), gen_laplacian_3d(5, 6, 4, 0.0)}) {
        for (int t = 0; t < 100; ++t) {
            DenseVector x = test::random_vector(A.n, 1000 + t);
            DenseVector y = sym_matvec(A, x);
            CHECK(dot(x, y) > 0.0);
        }
    }
}

TEST_CASE("validate catches structural defects") {
    SymSparseMatrix A = gen_laplacian_2d(3, 3, 0.0);
    CHECK(A.validate().empty());
    SymSparseMatrix bad = A;
    std::swap(bad.col_idx[1], bad.col_idx[2]);
    CHECK(!bad.validate().empty());
}
