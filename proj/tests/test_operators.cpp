#include <doctest.h>

#include <cmath>
#include <vector>

#include "perwave/operators.hpp"

using namespace perwave;

namespace {

SystemSpec scalar_periodic_sigma(std::size_t n = 128) {
    return make_scalar_spec(
        sample_function([](double x) { return 1.0 + 0.5 * std::sin(2 * M_PI * x); }, n, 1.0),
        PeriodicField::constant(0.0, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0));
}

}  // namespace

TEST_CASE("laplacian stencil for constant coefficients") {
    const auto spec = make_scalar_kpp(1.0, 0.0);
    const auto op = assemble_L(spec, 64, BoundaryKind::periodic, {0.0, 1.0});
    const double h2 = op.h * op.h;
    for (int j = 0; j < op.n; ++j) {
        CHECK(op.lo[std::size_t(j)] == doctest::Approx(1.0 / h2));
        CHECK(op.up[std::size_t(j)] == doctest::Approx(1.0 / h2));
        CHECK(op.diag[std::size_t(j)] == doctest::Approx(-2.0 / h2));
    }
}

TEST_CASE("periodic L annihilates constants") {
    const auto spec = scalar_periodic_sigma();
    const auto op = assemble_L(spec, 128, BoundaryKind::periodic, {0.0, 1.0});
    std::vector<double> ones(std::size_t(op.size()), 1.0);
    const auto out = op.apply(ones);
    for (double v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("divergence and nondivergence coincide for constant sigma") {
    auto spec = make_scalar_kpp(2.0, 0.0);
    spec.form = OperatorForm::divergence;
    const auto a = assemble_L(spec, 64, BoundaryKind::periodic, {0.0, 1.0});
    spec.form = OperatorForm::nondivergence;
    const auto b = assemble_L(spec, 64, BoundaryKind::periodic, {0.0, 1.0});
    for (std::size_t i = 0; i < a.diag.size(); ++i)
        CHECK(a.diag[i] == doctest::Approx(b.diag[i]).epsilon(1e-13));
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        CHECK(a.lo[i] == doctest::Approx(b.lo[i]).epsilon(1e-13));
        CHECK(a.up[i] == doctest::Approx(b.up[i]).epsilon(1e-13));
    }
}

TEST_CASE("constant-coefficient conjugation identity") {
    // d=1, sigma=1, q=0, A=r: (L_lambda + A) 1 = (lambda^2 + r) 1, up to the
    // O(lambda^4 h^2 / 12) fitting remainder of the exponential weights
    const auto spec = make_scalar_kpp(1.0, 1.0);
    for (double lambda : {0.0, 0.5, 1.0, -0.8}) {
        const auto op = assemble_L_lambda_periodic(spec, lambda, 64);
        std::vector<double> ones(std::size_t(op.size()), 1.0);
        const auto out = op.apply(ones);
        const double bound = 1e-12 + std::pow(lambda, 4) * op.h * op.h / 10.0;
        for (double v : out) CHECK(std::abs(v - (lambda * lambda + 1.0)) < bound);
    }
}

TEST_CASE("lambda=0 assembly equals L plus coupling") {
    const auto spec = scalar_periodic_sigma();
    const auto l = assemble_L(spec, 64, BoundaryKind::periodic, {0.0, 1.0});
    const auto b = assemble_L_lambda_periodic(spec, 0.0, 64);
    for (std::size_t i = 0; i < l.diag.size(); ++i)
        CHECK(b.diag[i] == doctest::Approx(l.diag[i] + 1.0));  // A = r = 1 on the diagonal
    for (std::size_t i = 0; i < l.lo.size(); ++i) {
        CHECK(b.lo[i] == doctest::Approx(l.lo[i]));
        CHECK(b.up[i] == doctest::Approx(l.up[i]));
    }
}

TEST_CASE("conjugation residual shrinks at second order") {
    // || (L_lambda + A) phi - e^{lambda x} (L + A)(e^{-lambda x} phi) ||_inf = O(h^2)
    const double lambda = 0.7;
    const auto phi_fn = [](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); };

    const auto residual_at = [&](int n_coarse) {
        const auto spec = scalar_periodic_sigma(512);
        const auto op = assemble_L_lambda_periodic(spec, lambda, n_coarse);

        std::vector<double> phi(std::size_t(n_coarse), 0.0);
        for (int j = 0; j < n_coarse; ++j) phi[std::size_t(j)] = phi_fn(op.node(j));
        const auto lhs = op.apply(phi);

        // direct fine-grid finite differences of e^{lambda x} (L + A)(e^{-lambda x} phi)
        const int refine = 16;
        const double hf = op.h / refine;
        const auto w = [&](double x) { return std::exp(-lambda * x) * phi_fn(x); };
        const auto& sig = spec.sigma[0];
        double worst = 0.0;
        for (int j = 0; j < n_coarse; ++j) {
            const double x = op.node(j);
            const double flux_r = sig(x + 0.5 * hf) * (w(x + hf) - w(x)) / hf;
            const double flux_l = sig(x - 0.5 * hf) * (w(x) - w(x - hf)) / hf;
            const double lw = (flux_r - flux_l) / hf;
            const double rhs = std::exp(lambda * x) * (lw + 1.0 * w(x));
            worst = std::max(worst, std::abs(lhs[std::size_t(j)] - rhs));
        }
        return worst;
    };

    const double r1 = residual_at(64);
    const double r2 = residual_at(128);
    CHECK(r1 < 0.05);
    CHECK(r1 / r2 > 2.5);  // ~ 4 for O(h^2)
    CHECK(r1 / r2 < 6.0);
}

TEST_CASE("apply is linear and respects lengths") {
    const auto spec = scalar_periodic_sigma();
    const auto op = assemble_L_lambda_periodic(spec, 0.3, 64);
    const int m = op.size();
    std::vector<double> u(std::size_t(m), 0.0), v(std::size_t(m), 0.0), lin(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) {
        u[std::size_t(i)] = std::sin(0.1 * i);
        v[std::size_t(i)] = std::cos(0.2 * i);
    }
    const auto au = op.apply(u);
    const auto av = op.apply(v);
    std::vector<double> combo(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) combo[std::size_t(i)] = 2.0 * u[std::size_t(i)] - 3.0 * v[std::size_t(i)];
    const auto ac = op.apply(combo);
    for (int i = 0; i < m; ++i)
        CHECK(ac[std::size_t(i)] ==
              doctest::Approx(2.0 * au[std::size_t(i)] - 3.0 * av[std::size_t(i)]).epsilon(1e-12));

    std::vector<double> zero(std::size_t(m), 0.0);
    for (double w : op.apply(zero)) CHECK(w == 0.0);
    std::vector<double> wrong(std::size_t(m + 1), 0.0);
    std::vector<double> out(std::size_t(m), 0.0);
    CHECK_THROWS(op.apply(wrong, out));
}

TEST_CASE("shift equivariance for constant-coefficient circulant") {
    const auto spec = make_scalar_kpp(1.0, 1.0);
    const auto op = assemble_L_lambda_periodic(spec, 0.4, 64);
    const int m = op.size();
    std::vector<double> u(std::size_t(m), 0.0), shifted(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) u[std::size_t(i)] = std::exp(std::sin(2 * M_PI * i / m));
    for (int i = 0; i < m; ++i) shifted[std::size_t(i)] = u[std::size_t((i + 5) % m)];
    const auto au = op.apply(u);
    const auto as = op.apply(shifted);
    for (int i = 0; i < m; ++i)
        CHECK(as[std::size_t(i)] == doctest::Approx(au[std::size_t((i + 5) % m)]).epsilon(1e-10));
}

TEST_CASE("cooperativity inheritance: nonnegative off-diagonal entries") {
    const std::size_t n = 128;
    MutationCompetition mc{
        sample_function([](double x) { return 3.0 + 0.5 * std::cos(2 * M_PI * x); }, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0)};
    const auto spec = make_mutation_spec(PeriodicField::constant(1.0, n, 1.0),
                                         PeriodicField::constant(2.0, n, 1.0), mc);
    for (double lambda : {-2.0, 0.0, 1.0, 2.0}) {
        const auto op = assemble_L_lambda_periodic(spec, lambda, 128);
        CHECK(op.min_offdiag() >= 0.0);
    }
}

TEST_CASE("dirichlet assembly drops wrap entries") {
    const auto spec = make_scalar_kpp(1.0, 0.0);
    const auto op = assemble_L_lambda(spec, 0.0, 31, BoundaryKind::dirichlet, {-1.0, 1.0});
    CHECK(op.n == 31);
    CHECK(op.h == doctest::Approx(2.0 / 32.0));
    // applying to the first Dirichlet eigenvector reproduces the discrete eigenvalue
    std::vector<double> v(std::size_t(op.n));
    for (int j = 0; j < op.n; ++j) v[std::size_t(j)] = std::sin(M_PI * (op.node(j) + 1.0) / 2.0);
    const auto out = op.apply(v);
    const double mu = (2.0 / (op.h * op.h)) * (1.0 - std::cos(M_PI * op.h / 2.0));
    for (int j = 0; j < op.n; ++j)
        CHECK(out[std::size_t(j)] == doctest::Approx(-mu * v[std::size_t(j)]).epsilon(1e-8));
}

TEST_CASE("N below 16 is rejected") {
    const auto spec = make_scalar_kpp(1.0, 1.0);
    CHECK_THROWS(assemble_L(spec, 8, BoundaryKind::periodic, {0.0, 1.0}));
}
