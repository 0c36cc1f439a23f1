#include "perwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perwave/linalg.hpp"

namespace perwave {

namespace {

struct CwBracket {
    double lo, hi;
};

/// Matrix-vector product with extended-precision accumulation.  The raw
/// double product rounds at eps * ||B||_max ~ 1e-11 for fine grids, which
/// would floor the Collatz-Wielandt bracket far above tol; long-double
/// accumulation pushes the floor below 1e-13 for every grid used here.
void apply_precise(const DiscreteOperator& op, std::span<const double> v,
                   std::span<double> out) {
    const int d = op.d, n = op.n;
    const std::size_t dd = std::size_t(d) * d;
    for (int j = 0; j < n; ++j) {
        const double* blk = op.diag.data() + std::size_t(j) * dd;
        for (int i = 0; i < d; ++i) {
            long double acc = 0.0L;
            for (int l = 0; l < d; ++l)
                acc += static_cast<long double>(blk[std::size_t(i) * d + l]) * v[std::size_t(j) * d + l];
            const double cl = op.lo[std::size_t(j) * d + i];
            const double cu = op.up[std::size_t(j) * d + i];
            if (j > 0)
                acc += static_cast<long double>(cl) * v[std::size_t(j - 1) * d + i];
            else if (op.bc == BoundaryKind::periodic)
                acc += static_cast<long double>(cl) * v[std::size_t(n - 1) * d + i];
            if (j + 1 < n)
                acc += static_cast<long double>(cu) * v[std::size_t(j + 1) * d + i];
            else if (op.bc == BoundaryKind::periodic)
                acc += static_cast<long double>(cu) * v[std::size_t(i)];
            out[std::size_t(j) * d + i] = double(acc);
        }
    }
}

CwBracket collatz_wielandt(const DiscreteOperator& op, std::span<const double> phi,
                           std::span<double> work) {
    apply_precise(op, phi, work);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = work[i] / phi[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

BlockTridiagSolver shifted_solver(const DiscreteOperator& op, double t) {
    const std::size_t dd = std::size_t(op.d) * op.d;
    std::vector<double> diag(op.diag.size()), lo(op.lo.size()), up(op.up.size());
    for (int j = 0; j < op.n; ++j)
        for (int i = 0; i < op.d; ++i)
            for (int l = 0; l < op.d; ++l) {
                const std::size_t idx = std::size_t(j) * dd + std::size_t(i) * op.d + l;
                diag[idx] = (i == l ? t : 0.0) - op.diag[idx];
            }
    for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = -op.lo[i];
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = -op.up[i];
    return BlockTridiagSolver(op.n, op.d, op.bc == BoundaryKind::periodic, diag, lo, up);
}

}  // namespace

Eigenpair principal_eigen(const DiscreteOperator& op, const EigenOptions& opts) {
    const int m = op.size();
    if (op.min_offdiag() < -1e-12 * std::max(1.0, op.max_abs_diag()))
        throw std::runtime_error(
            "principal_eigen: operator has negative off-diagonal entries (not cooperative at "
            "this resolution)");

    std::vector<double> phi(std::size_t(m), 1.0);  // fixed deterministic start
    std::vector<double> work(std::size_t(m), 0.0);

    CwBracket cw = collatz_wielandt(op, phi, work);
    double lo = cw.lo, hi = cw.hi;
    int iterations = 0;
    const auto scale = [&] { return std::max(1.0, std::abs(hi)); };
    const auto converged = [&] { return hi - lo <= opts.tol_value * scale(); };

    // Outer loop re-tightens the inverse-iteration shift as the bracket
    // contracts; the inner loop runs solves at a fixed factorization.
    double width_before_outer = hi - lo;
    int stalled_outers = 0;
    for (int outer = 0; outer < 200 && iterations < opts.max_iter && !converged(); ++outer) {
        const double margin = std::max((hi - lo) * 1e-3, 1e-13 * scale());
        const double t = hi + margin;
        BlockTridiagSolver solver = shifted_solver(op, t);

        double prev_width = hi - lo;
        for (int inner = 0; inner < 64 && iterations < opts.max_iter; ++inner) {
            for (int i = 0; i < m; ++i) work[std::size_t(i)] = phi[std::size_t(i)];
            solver.solve(work);
            ++iterations;

            double sup = 0.0;
            for (double v : work) sup = std::max(sup, std::abs(v));
            if (!(sup > 0.0) || !std::isfinite(sup))
                throw std::runtime_error("principal_eigen: degenerate iterate");
            for (int i = 0; i < m; ++i) {
                const double v = work[std::size_t(i)] / sup;
                if (v <= 0.0)
                    throw std::runtime_error(
                        "principal_eigen: non-positive iterate (broken cooperativity)");
                phi[std::size_t(i)] = v;
            }

            cw = collatz_wielandt(op, phi, work);
            lo = std::max(lo, cw.lo);
            hi = std::min(hi, cw.hi);
            const double width = hi - lo;
            if (width <= opts.tol_value * scale()) break;
            if (width > 0.45 * prev_width && inner >= 2) break;  // shift stopped paying off
            prev_width = width;
        }

        // two consecutive outer rounds without progress: rounding floor hit
        if (hi - lo > 0.9 * width_before_outer) {
            if (++stalled_outers >= 2) break;
        } else {
            stalled_outers = 0;
        }
        width_before_outer = hi - lo;
    }

    const double mu = 0.5 * (lo + hi);
    apply_precise(op, phi, work);
    double residual = 0.0;
    for (int i = 0; i < m; ++i)
        residual = std::max(residual, std::abs(work[std::size_t(i)] - mu * phi[std::size_t(i)]));

    if (!converged() && residual > opts.tol_residual)
        throw std::runtime_error("principal_eigen: no convergence after " +
                                 std::to_string(iterations) + " iterations (bracket width " +
                                 std::to_string(hi - lo) + ", residual " +
                                 std::to_string(residual) + ")");

    Eigenpair out;
    out.value = -mu;
    out.vector = std::move(phi);
    out.residual = residual;
    out.iterations = iterations;
    out.grid_n = op.n;
    return out;
}

Eigenpair k_of_lambda(const SystemSpec& spec, double lambda, int N, const EigenOptions& opts) {
    constexpr int kMaxGrid = 8192;
    int n = N;
    Eigenpair coarse = principal_eigen(assemble_L_lambda_periodic(spec, lambda, n), opts);
    while (true) {
        Eigenpair fine = principal_eigen(assemble_L_lambda_periodic(spec, lambda, 2 * n), opts);
        if (std::abs(fine.value - coarse.value) <= 1e-6 || 2 * n >= kMaxGrid) return fine;
        n *= 2;
        coarse = std::move(fine);
    }
}

double KCurve::min_concavity_margin() const {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        margin = std::min(margin, values[i] - 0.5 * (values[i - 1] + values[i + 1]));
    return margin;
}

KCurve k_curve(const SystemSpec& spec, double lambda_min, double lambda_max, int M, int N) {
    if (M < 5) throw std::invalid_argument("k_curve: needs at least 5 samples");
    if (!(lambda_max > lambda_min)) throw std::invalid_argument("k_curve: empty range");
    KCurve curve;
    curve.lambdas.resize(std::size_t(M));
    curve.values.resize(std::size_t(M));
    curve.residuals.resize(std::size_t(M));
    for (int i = 0; i < M; ++i) {
        const double lam = lambda_min + (lambda_max - lambda_min) * double(i) / double(M - 1);
        Eigenpair p = k_of_lambda(spec, lam, N);
        curve.lambdas[std::size_t(i)] = lam;
        curve.values[std::size_t(i)] = p.value;
        curve.residuals[std::size_t(i)] = p.residual;
    }
    return curve;
}

DirichletEigen lambda1_dirichlet(const SystemSpec& spec, double R, int N,
                                 const EigenOptions& opts) {
    if (!(R > 0.0)) throw std::invalid_argument("lambda1_dirichlet: R must be positive");
    const Interval dom{-R, R};
    Eigenpair coarse =
        principal_eigen(assemble_L_lambda(spec, 0.0, N, BoundaryKind::dirichlet, dom), opts);
    Eigenpair fine = principal_eigen(
        assemble_L_lambda(spec, 0.0, 2 * N + 1, BoundaryKind::dirichlet, dom), opts);

    DirichletEigen out;
    out.value_coarse = coarse.value;
    out.value = (4.0 * fine.value - coarse.value) / 3.0;  // h -> h/2 Richardson
    out.pair = std::move(fine);
    out.radius = R;
    return out;
}

std::pair<double, double> maximize_k(const SystemSpec& spec, int N, double tol_lambda) {
    const auto k = [&](double lam) { return k_of_lambda(spec, lam, N).value; };

    double big = 1.0;
    const double k0 = k(0.0);
    double k_left = k(-big), k_right = k(big);
    while ((k_left >= k0 || k_right >= k0) && big < 1024.0) {
        big *= 2.0;
        k_left = k(-big);
        k_right = k(big);
    }
    if (k_left >= k0 || k_right >= k0)
        throw std::runtime_error("maximize_k: bracket expansion failed");

    // golden-section maximization on the strictly concave curve
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -big, b = big;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = k(x1), f2 = k(x2);
    while (b - a > tol_lambda) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = k(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = k(x1);
        }
    }
    const double arg = 0.5 * (a + b);
    return {arg, k(arg)};
}

Lambda1Infinity lambda1_infinity(const SystemSpec& spec, int N, bool with_dirichlet_tail) {
    Lambda1Infinity out;
    auto [arg, val] = maximize_k(spec, N);
    out.argmax = arg;
    out.value = val;
    if (with_dirichlet_tail) {
        const double L = spec.period;
        const std::array<double, 4> mult{2.0, 4.0, 8.0, 16.0};
        for (std::size_t i = 0; i < mult.size(); ++i) {
            const double R = mult[i] * L;
            const int nodes = std::max(255, int(64.0 * 2.0 * R / L) - 1);
            DirichletEigen de = lambda1_dirichlet(spec, R, nodes);
            out.radii[i] = R;
            out.dirichlet_tail[i] = de.value;
        }
    }
    return out;
}

double minimax_lower_bound(const DiscreteOperator& op, std::span<const double> phi_test) {
    if (int(phi_test.size()) != op.size())
        throw std::invalid_argument("minimax_lower_bound: length mismatch");
    for (double v : phi_test)
        if (!(v > 0.0))
            throw std::invalid_argument("minimax_lower_bound: test function must be positive");
    std::vector<double> w(phi_test.size());
    op.apply(phi_test, w);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) bound = std::min(bound, -w[i] / phi_test[i]);
    return bound;
}

double minimax_lower_bound(const SystemSpec& spec, double lambda,
                           std::span<const PeriodicField> phi_test, int N) {
    if (int(phi_test.size()) != spec.d)
        throw std::invalid_argument("minimax_lower_bound: needs d test fields");
    DiscreteOperator op = assemble_L_lambda_periodic(spec, lambda, N);
    std::vector<double> phi(std::size_t(op.size()));
    for (int j = 0; j < op.n; ++j)
        for (int i = 0; i < op.d; ++i)
            phi[std::size_t(j) * op.d + i] = phi_test[std::size_t(i)](op.node(j));
    return minimax_lower_bound(op, phi);
}

}  // namespace perwave
