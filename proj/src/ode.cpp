#include "perwave/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perwave {

void OdeParams::validate() const {
    if (!(kappa_u > 0.0 && kappa_v > 0.0 && mu_u > 0.0 && mu_v > 0.0))
        throw std::invalid_argument("OdeParams: kappa and mu must be strictly positive");
}

std::array<double, 2> OdeParams::rhs(double u, double v) const {
    return {(r_u - kappa_u * (u + v)) * u + mu_v * v - mu_u * u,
            (r_v - kappa_v * (u + v)) * v + mu_u * u - mu_v * v};
}

OdeEigen lambda_A(const OdeParams& p) {
    p.validate();
    const double au = p.r_u - p.mu_u;
    const double av = p.r_v - p.mu_v;
    const double disc = std::sqrt((au - av) * (au - av) + 4.0 * p.mu_u * p.mu_v);
    OdeEigen out;
    out.lambda1 = 0.5 * (au + av + disc);
    out.lambda2 = 0.5 * (au + av - disc);
    out.phi1 = {au - av + disc, 2.0 * p.mu_u};
    const double sup = std::max(out.phi1[0], out.phi1[1]);
    out.phi1[0] /= sup;
    out.phi1[1] /= sup;
    return out;
}

std::optional<Equilibrium> equilibrium(const OdeParams& p) {
    p.validate();
    const OdeEigen eig = lambda_A(p);
    if (eig.lambda1 <= 0.0) return std::nullopt;

    const double ratio = p.kappa_u / p.kappa_v;
    const double b = p.r_u - p.mu_u - ratio * (p.r_v - p.mu_v);
    const double Q = p.kappa_v / (2.0 * p.mu_u * p.kappa_u) *
                     (b + std::sqrt(b * b + 4.0 * ratio * p.mu_u * p.mu_v));
    const double S = (p.r_v + p.mu_u * Q - p.mu_v) / p.kappa_v;

    Equilibrium eq;
    eq.Q = Q;
    eq.S = S;
    eq.u = Q * S / (1.0 + Q);
    eq.v = S / (1.0 + Q);
    eq.lambda_A = eig.lambda1;
    eq.phi_A = eig.phi1;
    const auto j = jacobian(p, eq.u, eq.v);
    eq.a = j[0];
    eq.b = j[1];
    eq.c = j[2];
    eq.d = j[3];

    if (!(eq.u > 0.0 && eq.v > 0.0))
        throw std::runtime_error("equilibrium: closed form produced a nonpositive state");

    // bound windows of the uniqueness lemma, with a small slack for the
    // equality case mu_v = r_u - mu_u
    const double slack = 1e-9 * (1.0 + std::abs(eq.u) + std::abs(eq.v));
    const double au = p.r_u - p.mu_u, av = p.r_v - p.mu_v;
    if (au > 0.0) {
        const double lo = std::min(p.mu_v, au) / p.kappa_u, hi = std::max(p.mu_v, au) / p.kappa_u;
        if (eq.u < lo - slack || eq.u > hi + slack)
            throw std::runtime_error("equilibrium: u* violates its bound window");
    } else if (!(eq.u < p.mu_v / p.kappa_u + slack)) {
        throw std::runtime_error("equilibrium: u* violates its bound window");
    }
    if (av > 0.0) {
        const double lo = std::min(p.mu_u, av) / p.kappa_v, hi = std::max(p.mu_u, av) / p.kappa_v;
        if (eq.v < lo - slack || eq.v > hi + slack)
            throw std::runtime_error("equilibrium: v* violates its bound window");
    } else if (!(eq.v < p.mu_u / p.kappa_v + slack)) {
        throw std::runtime_error("equilibrium: v* violates its bound window");
    }
    return eq;
}

std::array<double, 4> jacobian(const OdeParams& p, double u, double v) {
    return {p.r_u - p.mu_u - p.kappa_u * (2.0 * u + v), p.mu_v - p.kappa_u * u,
            p.mu_u - p.kappa_v * v, p.r_v - p.mu_v - p.kappa_v * (u + 2.0 * v)};
}

StabilityCertificate stability_certificate(const Equilibrium& eq) {
    StabilityCertificate cert;
    cert.trace = eq.a + eq.d;
    cert.det = eq.a * eq.d - eq.b * eq.c;
    cert.stable = cert.trace < 0.0 && cert.det > 0.0;
    return cert;
}

std::optional<double> lyapunov_K(const OdeParams& p, const Equilibrium& eq) {
    if (std::max(p.r_u - p.mu_u, p.r_v - p.mu_v) <= 0.0) return std::nullopt;
    const double A = p.kappa_u;
    const double B = p.kappa_u - p.mu_v / eq.u;
    const double C = p.kappa_v - p.mu_u / eq.v;
    const double D = p.kappa_v;

    const double tiny = 1e-12 * (A + D);
    if (std::abs(B) < tiny && std::abs(C) < tiny) return 1.0;  // P(K) degenerates
    const double lin = 4.0 * A * D - 2.0 * B * C;              // > 0 since BC < AD
    if (std::abs(C) < tiny) return 2.0 * B * B / lin;
    return 0.5 * lin / (C * C);  // midpoint of the two positive roots of P
}

double lyapunov_value(double K, const Equilibrium& eq, double u, double v) {
    if (!(u > 0.0 && v > 0.0))
        throw std::domain_error("lyapunov_value: state must be positive");
    const double fu = u - eq.u - eq.u * std::log(u / eq.u);
    const double fv = v - eq.v - eq.v * std::log(v / eq.v);
    return fu + K * fv;
}

OdeTrajectory integrate(const OdeParams& p, double u0, double v0, double T, double dt) {
    p.validate();
    if (u0 < 0.0 || v0 < 0.0) throw std::invalid_argument("integrate: state must be nonnegative");
    OdeTrajectory traj;
    double t = 0.0, u = u0, v = v0;
    traj.t.push_back(t);
    traj.u.push_back(u);
    traj.v.push_back(v);

    while (t < T) {
        const auto j = jacobian(p, u, v);
        const double jnorm =
            std::max(std::abs(j[0]) + std::abs(j[1]), std::abs(j[2]) + std::abs(j[3]));
        double step = std::min(dt, 0.1 / std::max(jnorm, 1e-12));
        step = std::min(step, T - t);

        const auto k1 = p.rhs(u, v);
        const auto k2 = p.rhs(u + 0.5 * step * k1[0], v + 0.5 * step * k1[1]);
        const auto k3 = p.rhs(u + 0.5 * step * k2[0], v + 0.5 * step * k2[1]);
        const auto k4 = p.rhs(u + step * k3[0], v + step * k3[1]);
        u += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        v += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        if (!std::isfinite(u) || !std::isfinite(v) || u < -1.0 || v < -1.0)
            throw std::runtime_error("integrate: blow-up");
        u = std::max(u, 0.0);
        v = std::max(v, 0.0);
        t += step;
        traj.t.push_back(t);
        traj.u.push_back(u);
        traj.v.push_back(v);
    }
    return traj;
}

double decay_rate_omega(const Equilibrium& eq, double sigma_u, double sigma_v) {
    if (!(sigma_u > 0.0 && sigma_v > 0.0))
        throw std::invalid_argument("decay_rate_omega: diffusivities must be positive");
    const double wu = 1.0 / sigma_u, wv = 1.0 / sigma_v;
    const double omega =
        std::min(-(eq.a + eq.d) / 2.0, -(wu * eq.a + wv * eq.d) / (wu + wv));
    if (!(omega > 0.0))
        throw std::runtime_error("decay_rate_omega: nonpositive rate, equilibrium inconsistent");
    return omega;
}

}  // namespace perwave
