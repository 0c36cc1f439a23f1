#include <doctest.h>

#include <random>
#include <vector>

#include "perwave/linalg.hpp"

using namespace perwave;

namespace {

// reference dense solve by Gaussian elimination with partial pivoting
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, int m) {
    for (int k = 0; k < m; ++k) {
        int p = k;
        for (int i = k + 1; i < m; ++i)
            if (std::abs(a[std::size_t(i) * m + k]) > std::abs(a[std::size_t(p) * m + k])) p = i;
        for (int j = 0; j < m; ++j) std::swap(a[std::size_t(k) * m + j], a[std::size_t(p) * m + j]);
        std::swap(b[std::size_t(k)], b[std::size_t(p)]);
        for (int i = k + 1; i < m; ++i) {
            const double f = a[std::size_t(i) * m + k] / a[std::size_t(k) * m + k];
            for (int j = k; j < m; ++j) a[std::size_t(i) * m + j] -= f * a[std::size_t(k) * m + j];
            b[std::size_t(i)] -= f * b[std::size_t(k)];
        }
    }
    for (int i = m - 1; i >= 0; --i) {
        double acc = b[std::size_t(i)];
        for (int j = i + 1; j < m; ++j) acc -= a[std::size_t(i) * m + j] * b[std::size_t(j)];
        b[std::size_t(i)] = acc / a[std::size_t(i) * m + i];
    }
    return b;
}

}  // namespace

TEST_CASE("SmallLU solves small systems") {
    const std::vector<double> a{4.0, 1.0, 2.0, -3.0};
    SmallLU lu(a, 2);
    std::vector<double> b{9.0, -8.0};
    lu.solve(b);
    CHECK(4.0 * b[0] + 1.0 * b[1] == doctest::Approx(9.0));
    CHECK(2.0 * b[0] - 3.0 * b[1] == doctest::Approx(-8.0));
}

TEST_CASE("block tridiagonal solver matches dense solve") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 1.0);

    for (const bool periodic : {false, true}) {
        for (const int d : {1, 2, 3}) {
            const int n = 12;
            const int m = n * d;
            std::vector<double> diag(std::size_t(n) * d * d), lo(std::size_t(n) * d),
                up(std::size_t(n) * d);
            std::vector<double> dense(std::size_t(m) * m, 0.0);

            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < d; ++i) {
                    for (int l = 0; l < d; ++l) {
                        const double v = (i == l) ? 8.0 + unif(rng) : -unif(rng) * 0.3;
                        diag[std::size_t(j) * d * d + std::size_t(i) * d + l] = v;
                        dense[std::size_t(j * d + i) * m + j * d + l] = v;
                    }
                    lo[std::size_t(j) * d + i] = -unif(rng);
                    up[std::size_t(j) * d + i] = -unif(rng);
                    if (j > 0)
                        dense[std::size_t(j * d + i) * m + (j - 1) * d + i] = lo[std::size_t(j) * d + i];
                    else if (periodic)
                        dense[std::size_t(i) * m + (n - 1) * d + i] = lo[std::size_t(i)];
                    if (j + 1 < n)
                        dense[std::size_t(j * d + i) * m + (j + 1) * d + i] = up[std::size_t(j) * d + i];
                    else if (periodic)
                        dense[std::size_t(j * d + i) * m + i] = up[std::size_t(j) * d + i];
                }
            }
            if (!periodic)
                for (int i = 0; i < d; ++i) {
                    lo[std::size_t(i)] = 0.0;
                    up[std::size_t(n - 1) * d + i] = 0.0;
                }

            BlockTridiagSolver solver(n, d, periodic, diag, lo, up);
            std::vector<double> b(std::size_t(m), 0.0);
            for (auto& v : b) v = unif(rng) - 0.3;
            std::vector<double> x = b;
            solver.solve(x);
            const std::vector<double> ref = dense_solve(dense, b, m);
            for (int i = 0; i < m; ++i)
                CHECK(x[std::size_t(i)] == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("scalar tridiagonal solver, plain and periodic") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    const int n = 40;

    for (const bool periodic : {false, true}) {
        std::vector<double> lo(std::size_t(n), 0.0), di(std::size_t(n), 0.0), up(std::size_t(n), 0.0);
        std::vector<double> dense(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            lo[std::size_t(i)] = -unif(rng);
            up[std::size_t(i)] = -unif(rng);
            di[std::size_t(i)] = 4.0 + unif(rng);
            dense[std::size_t(i) * n + i] = di[std::size_t(i)];
            if (i > 0)
                dense[std::size_t(i) * n + i - 1] = lo[std::size_t(i)];
            else if (periodic)
                dense[std::size_t(0) * n + n - 1] = lo[0];
            if (i + 1 < n)
                dense[std::size_t(i) * n + i + 1] = up[std::size_t(i)];
            else if (periodic)
                dense[std::size_t(n - 1) * n + 0] = up[std::size_t(n - 1)];
        }
        if (!periodic) {
            lo[0] = 0.0;
            up[std::size_t(n - 1)] = 0.0;
        }

        ScalarTridiagSolver solver(lo, di, up, periodic);
        std::vector<double> b(std::size_t(n), 0.0);
        for (auto& v : b) v = unif(rng);
        std::vector<double> x = b;
        solver.solve(x);
        const std::vector<double> ref = dense_solve(dense, b, n);
        for (int i = 0; i < n; ++i)
            CHECK(x[std::size_t(i)] == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-10));
    }
}
