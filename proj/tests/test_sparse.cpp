#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nondivfem/sparse.hpp"

using namespace ndfem;

namespace {

CsrMatrix identity(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return CsrMatrix::from_triplets(n, std::move(t));
}

// diagonally dominant random SPD matrix
CsrMatrix random_spd(int n, testing::Rng& rng) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < i; ++j) {
            if (rng.uniform() < 0.2) {
                const double v = rng.uniform(-1.0, 1.0);
                t.push_back({i, j, v});
                t.push_back({j, i, v});
                row_sum += std::abs(v);
            }
        }
        t.push_back({i, i, row_sum + rng.uniform(1.0, 2.0) + 2.0});
    }
    return CsrMatrix::from_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("identity system solves in one iteration") {
    const CsrMatrix a = identity(5);
    std::vector<double> b(5, 0.0);
    b[0] = 1.0;
    SolveStats stats;
    const auto x = pcg_solve(a, b, 1e-12, 10, Preconditioner::jacobi, &stats);
    CHECK(stats.iterations == 1);
    CHECK(x[0] == doctest::Approx(1.0));
    for (int i = 1; i < 5; ++i) CHECK(x[i] == doctest::Approx(0.0));
}

TEST_CASE("2x2 hand-solved system") {
    std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}};
    const CsrMatrix a = CsrMatrix::from_triplets(2, std::move(t));
    const auto x = pcg_solve(a, {1.0, 0.0}, 1e-14, 50, Preconditioner::jacobi);
    CHECK(x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("duplicate triplets are accumulated") {
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, 1.5}, {1, 1, 2.0}};
    const CsrMatrix a = CsrMatrix::from_triplets(2, std::move(t));
    CHECK(a.nnz() == 2);
    CHECK(a.diagonal()[0] == doctest::Approx(2.5));
}

TEST_CASE("pcg agrees with the dense Cholesky oracle") {
    testing::Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 40 + 10 * trial;
        const CsrMatrix a = random_spd(n, rng);
        std::vector<double> b(n);
        for (double& v : b) v = rng.uniform(-1.0, 1.0);
        const auto exact = dense_cholesky_solve(a, b);
        for (Preconditioner p : {Preconditioner::jacobi, Preconditioner::ichol}) {
            const auto x = pcg_solve(a, b, 1e-12, 10 * n, p);
            double err = 0.0;
            for (int i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - exact[i]));
            CHECK(err < 1e-9);
        }
    }
}

TEST_CASE("preconditioned residual history is monitored and tolerances hold") {
    testing::Rng rng(43);
    const CsrMatrix a = random_spd(120, rng);
    std::vector<double> b(120);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    SolveStats stats;
    pcg_solve(a, b, 1e-10, 2000, Preconditioner::ichol, &stats);
    CHECK(stats.converged);
    CHECK(stats.relative_residual <= 1e-10);
    CHECK(stats.residual_history.size() >= 2);
    CHECK(stats.residual_history.back() <= 1e-10);
}

TEST_CASE("energy-norm error decreases monotonically (CG property)") {
    testing::Rng rng(47);
    const int n = 30;
    const CsrMatrix a = random_spd(n, rng);
    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    const auto exact = dense_cholesky_solve(a, b);

    // CG is deterministic, so looser tolerances return prefixes of the same
    // iteration; their A-norm errors must be non-increasing
    double previous = 1e300;
    for (double tol : {1e-1, 1e-2, 1e-3, 1e-5, 1e-7, 1e-9, 1e-11}) {
        const auto x = pcg_solve(a, b, tol, 500, Preconditioner::none);
        std::vector<double> diff(n);
        for (int i = 0; i < n; ++i) diff[i] = x[i] - exact[i];
        const auto adiff = a.multiply(diff);
        double energy = 0.0;
        for (int i = 0; i < n; ++i) energy += diff[i] * adiff[i];
        CHECK(energy <= previous * (1.0 + 1e-12));
        previous = energy;
    }
}

TEST_CASE("breakdown on an indefinite matrix is reported") {
    std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, -1.0}};
    const CsrMatrix a = CsrMatrix::from_triplets(2, std::move(t));
    CHECK_THROWS_AS(pcg_solve(a, {1.0, 1.0}, 1e-10, 50, Preconditioner::none), SolveError);
}

TEST_CASE("dense cholesky rejects non-SPD input") {
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 3.0}, {1, 0, 3.0}, {1, 1, 1.0}};
    const CsrMatrix a = CsrMatrix::from_triplets(2, std::move(t));
    CHECK_THROWS_AS(dense_cholesky_solve(a, {1.0, 1.0}), SolveError);
}

TEST_CASE("lanczos smallest Ritz value approximates the smallest eigenvalue") {
    testing::Rng rng(53);
    const CsrMatrix a = random_spd(80, rng);
    const double ritz = lanczos_smallest_ritz(a, 40);
    CHECK(ritz > 0.0);

    // oracle: dense inverse power iteration via repeated solves
    std::vector<double> v(80, 1.0);
    double eig = 0.0;
    for (int it = 0; it < 200; ++it) {
        v = dense_cholesky_solve(a, v);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        const auto av = a.multiply(v);
        eig = 0.0;
        for (int i = 0; i < 80; ++i) eig += v[i] * av[i];
    }
    CHECK(ritz >= eig - 1e-8);           // Ritz values bound from above
    CHECK(ritz <= eig * 1.05 + 1e-8);    // and converge towards it
}

TEST_CASE("symmetry defect of a symmetric matrix is zero") {
    testing::Rng rng(59);
    const CsrMatrix a = random_spd(50, rng);
    CHECK(a.symmetry_defect() == 0.0);
}
