#include "perwave/operators.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace perwave {

void DiscreteOperator::apply(std::span<const double> v, std::span<double> out) const {
    if (int(v.size()) != size() || int(out.size()) != size())
        throw std::invalid_argument("DiscreteOperator::apply: length mismatch");
    const std::size_t dd = std::size_t(d) * d;
    for (int j = 0; j < n; ++j) {
        const double* blk = diag.data() + std::size_t(j) * dd;
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int l = 0; l < d; ++l) acc += blk[std::size_t(i) * d + l] * v[std::size_t(j) * d + l];
            const double cl = lo[std::size_t(j) * d + i];
            const double cu = up[std::size_t(j) * d + i];
            if (j > 0)
                acc += cl * v[std::size_t(j - 1) * d + i];
            else if (bc == BoundaryKind::periodic)
                acc += cl * v[std::size_t(n - 1) * d + i];
            if (j + 1 < n)
                acc += cu * v[std::size_t(j + 1) * d + i];
            else if (bc == BoundaryKind::periodic)
                acc += cu * v[std::size_t(i)];
            out[std::size_t(j) * d + i] = acc;
        }
    }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> v) const {
    std::vector<double> out(v.size());
    apply(v, out);
    return out;
}

double DiscreteOperator::min_offdiag() const {
    double m = 0.0;
    bool first = true;
    auto take = [&](double v) {
        if (first || v < m) m = v;
        first = false;
    };
    const std::size_t dd = std::size_t(d) * d;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l)
                if (i != l) take(diag[std::size_t(j) * dd + std::size_t(i) * d + l]);
        for (int i = 0; i < d; ++i) {
            const bool has_lo = j > 0 || bc == BoundaryKind::periodic;
            const bool has_up = j + 1 < n || bc == BoundaryKind::periodic;
            if (has_lo) take(lo[std::size_t(j) * d + i]);
            if (has_up) take(up[std::size_t(j) * d + i]);
        }
    }
    return m;
}

double DiscreteOperator::max_abs_diag() const {
    double m = 0.0;
    const std::size_t dd = std::size_t(d) * d;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i)
            m = std::max(m, std::abs(diag[std::size_t(j) * dd + std::size_t(i) * d + i]));
    return m;
}

void DiscreteOperator::dump_triplets(std::ostream& os) const {
    const std::size_t dd = std::size_t(d) * d;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) {
            const int row = j * d + i;
            for (int l = 0; l < d; ++l)
                os << row << ' ' << j * d + l << ' ' << diag[std::size_t(j) * dd + std::size_t(i) * d + l]
                   << '\n';
            if (j > 0)
                os << row << ' ' << (j - 1) * d + i << ' ' << lo[std::size_t(j) * d + i] << '\n';
            else if (bc == BoundaryKind::periodic)
                os << row << ' ' << (n - 1) * d + i << ' ' << lo[std::size_t(j) * d + i] << '\n';
            if (j + 1 < n)
                os << row << ' ' << (j + 1) * d + i << ' ' << up[std::size_t(j) * d + i] << '\n';
            else if (bc == BoundaryKind::periodic)
                os << row << ' ' << i << ' ' << up[std::size_t(j) * d + i] << '\n';
        }
}

namespace {

DiscreteOperator assemble_impl(const SystemSpec& spec, double lambda, int N, BoundaryKind bc,
                               const Interval& domain, bool include_coupling) {
    if (N < 16) throw std::invalid_argument("assemble: N must be at least 16");
    spec.validate();

    DiscreteOperator op;
    op.d = spec.d;
    op.n = N;
    op.bc = bc;
    op.lambda = lambda;
    op.form = spec.form;

    if (bc == BoundaryKind::periodic) {
        op.h = domain.length() / N;
        op.x0 = domain.lo;
    } else {
        // N interior nodes of (lo, hi); boundary values are zero.
        op.h = domain.length() / (N + 1);
        op.x0 = domain.lo + op.h;
    }

    const int d = op.d;
    const std::size_t dd = std::size_t(d) * d;
    op.diag.assign(std::size_t(N) * dd, 0.0);
    op.lo.assign(std::size_t(N) * d, 0.0);
    op.up.assign(std::size_t(N) * d, 0.0);

    const double h = op.h;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 1.0 / (2.0 * h);

    // Exponentially fitted conjugation: write w = e^{-lambda x} phi on the
    // stencil, so that (L_lambda phi)_j = e^{lambda x_j} (L_h w)_j with the
    // neighbor weights picking up e^{+lambda h} (left) and e^{-lambda h}
    // (right).  This reproduces the expanded coefficients of L_lambda to
    // O(h^2), keeps every off-diagonal entry positive for all lambda, and
    // makes the q = 0 divergence assembly at -lambda the exact transpose of
    // the one at +lambda (symmetric A then gives k(-lambda) = k(lambda) to
    // solver precision).
    const double e_minus = std::exp(-lambda * h);
    const double e_plus = std::exp(lambda * h);

    for (int j = 0; j < N; ++j) {
        const double x = op.node(j);
        for (int i = 0; i < d; ++i) {
            const auto& sig = spec.sigma[std::size_t(i)];
            const double s_here = sig(x);
            const double q_here = spec.q[std::size_t(i)](x);

            double c_lo, c_up, c_diag2;
            if (spec.form == OperatorForm::divergence) {
                const double s_w = sig(x - 0.5 * h);
                const double s_e = sig(x + 0.5 * h);
                c_lo = s_w * inv_h2 * e_plus;
                c_up = s_e * inv_h2 * e_minus;
                c_diag2 = -(s_w + s_e) * inv_h2;
            } else {
                c_lo = s_here * inv_h2 * e_plus;
                c_up = s_here * inv_h2 * e_minus;
                c_diag2 = -2.0 * s_here * inv_h2;
            }

            // advection q phi_x, conjugated and centered
            c_up += q_here * inv_2h * e_minus;
            c_lo -= q_here * inv_2h * e_plus;

            op.lo[std::size_t(j) * d + i] = c_lo;
            op.up[std::size_t(j) * d + i] = c_up;
            op.diag[std::size_t(j) * dd + std::size_t(i) * d + i] += c_diag2;

            if (include_coupling)
                for (int l = 0; l < d; ++l)
                    op.diag[std::size_t(j) * dd + std::size_t(i) * d + l] += spec.a(i, l, x);
        }
    }
    return op;
}

}  // namespace

DiscreteOperator assemble_L(const SystemSpec& spec, int N, BoundaryKind bc,
                            const Interval& domain) {
    return assemble_impl(spec, 0.0, N, bc, domain, false);
}

DiscreteOperator assemble_L_lambda(const SystemSpec& spec, double lambda, int N, BoundaryKind bc,
                                   const Interval& domain) {
    return assemble_impl(spec, lambda, N, bc, domain, true);
}

DiscreteOperator assemble_L_lambda_periodic(const SystemSpec& spec, double lambda, int N) {
    return assemble_impl(spec, lambda, N, BoundaryKind::periodic, {0.0, spec.period}, true);
}

}  // namespace perwave
