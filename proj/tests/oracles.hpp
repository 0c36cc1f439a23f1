// Test-only reference implementations, independent of the library's solver
// paths.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "perwave/operators.hpp"

namespace oracles {

/// Dense row-major copy of a block-tridiagonal operator.
inline std::vector<double> dense_matrix(const perwave::DiscreteOperator& op) {
    const int m = op.size();
    std::vector<double> a(std::size_t(m) * m, 0.0);
    const int d = op.d, n = op.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) {
            const int row = j * d + i;
            for (int l = 0; l < d; ++l)
                a[std::size_t(row) * m + j * d + l] +=
                    op.diag[std::size_t(j) * d * d + std::size_t(i) * d + l];
            if (j > 0)
                a[std::size_t(row) * m + (j - 1) * d + i] += op.lo[std::size_t(j) * d + i];
            else if (op.bc == perwave::BoundaryKind::periodic)
                a[std::size_t(row) * m + (n - 1) * d + i] += op.lo[std::size_t(j) * d + i];
            if (j + 1 < n)
                a[std::size_t(row) * m + (j + 1) * d + i] += op.up[std::size_t(j) * d + i];
            else if (op.bc == perwave::BoundaryKind::periodic)
                a[std::size_t(row) * m + i] += op.up[std::size_t(j) * d + i];
        }
    return a;
}

/// Sign of det(M) for a dense row-major matrix (LU with partial pivoting);
/// returns 0 on effectively singular input.
inline int det_sign(std::vector<double> a, int m) {
    int sign = 1;
    for (int k = 0; k < m; ++k) {
        int p = k;
        double best = std::abs(a[std::size_t(k) * m + k]);
        for (int i = k + 1; i < m; ++i)
            if (std::abs(a[std::size_t(i) * m + k]) > best) {
                best = std::abs(a[std::size_t(i) * m + k]);
                p = i;
            }
        if (best < 1e-300) return 0;
        if (p != k) {
            for (int j = 0; j < m; ++j) std::swap(a[std::size_t(k) * m + j], a[std::size_t(p) * m + j]);
            sign = -sign;
        }
        if (a[std::size_t(k) * m + k] < 0.0) sign = -sign;
        const double inv = 1.0 / a[std::size_t(k) * m + k];
        for (int i = k + 1; i < m; ++i) {
            const double f = a[std::size_t(i) * m + k] * inv;
            for (int j = k; j < m; ++j) a[std::size_t(i) * m + j] -= f * a[std::size_t(k) * m + j];
        }
    }
    return sign;
}

/// Perron root of B by determinant-sign bisection.  det(sI - B) is positive
/// for every s above the (simple) Perron root and negative just below it, so
/// the first sign change scanning down from the Collatz-Wielandt upper bound
/// is the root.  Row sums of B bound the root from both sides, giving an O(1)
/// scan window.  Independent of any power or inverse iteration.
inline double perron_root_by_det_bisection(const perwave::DiscreteOperator& op) {
    const std::vector<double> b = dense_matrix(op);
    const int m = op.size();
    const auto sign_at = [&](double s) {
        std::vector<double> a(std::size_t(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                a[std::size_t(i) * m + j] = (i == j ? s : 0.0) - b[std::size_t(i) * m + j];
        return det_sign(std::move(a), m);
    };

    double row_min = 1e300, row_max = -1e300;
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += b[std::size_t(i) * m + j];
        row_min = std::min(row_min, s);
        row_max = std::max(row_max, s);
    }
    double hi = row_max + 1.0;
    double lo = row_min - 1.0;
    if (sign_at(hi) <= 0) throw std::runtime_error("det bisection: bad upper bound");

    const int scan = 400;
    const double w = (hi - lo) / scan;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    for (int k = 1; k <= scan; ++k) {
        const double s = hi - w * k;
        if (sign_at(s) <= 0) {
            bracket_lo = s;
            bracket_hi = s + w;
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("det bisection: no sign change in the CW window");

    for (int it = 0; it < 200 && bracket_hi - bracket_lo > 1e-13 * std::max(1.0, std::abs(bracket_hi));
         ++it) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if (sign_at(mid) > 0)
            bracket_hi = mid;
        else
            bracket_lo = mid;
    }
    return 0.5 * (bracket_lo + bracket_hi);
}

/// Logistic solution of u' = r u (1 - u/K) from u0.
inline double logistic(double u0, double r, double K, double t) {
    return K * u0 * std::exp(r * t) / (K - u0 + u0 * std::exp(r * t));
}

}  // namespace oracles
