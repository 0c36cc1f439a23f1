#pragma once

#include <array>
#include <optional>
#include <vector>

namespace perwave {

/// Constant coefficients of the homogeneous two-species system
///   u' = (r_u - kappa_u (u+v)) u + mu_v v - mu_u u
///   v' = (r_v - kappa_v (u+v)) v + mu_u u - mu_v v.
struct OdeParams {
    double r_u = 0.0, r_v = 0.0;
    double kappa_u = 1.0, kappa_v = 1.0;
    double mu_u = 1.0, mu_v = 1.0;

    void validate() const;
    std::array<double, 2> rhs(double u, double v) const;
};

struct OdeEigen {
    double lambda1 = 0.0, lambda2 = 0.0;
    std::array<double, 2> phi1{};  // positive eigenvector of lambda1
};

/// Eigenvalues of the linearization at the origin,
/// lambda_{1,2} = ((r_u-mu_u)+(r_v-mu_v) +- sqrt(((r_u-mu_u)-(r_v-mu_v))^2 + 4 mu_u mu_v)) / 2.
OdeEigen lambda_A(const OdeParams& p);

struct Equilibrium {
    double u = 0.0, v = 0.0;
    double Q = 0.0, S = 0.0;      // Q = u/v, S = u+v
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // Jacobian at (u*, v*)
    double lambda_A = 0.0;
    std::array<double, 2> phi_A{};
};

/// Closed-form positive equilibrium: Q from the positive quadratic root,
/// S = (r_v + mu_u Q - mu_v)/kappa_v, then u* = QS/(1+Q), v* = S/(1+Q).
/// Returns nullopt when lambda_A <= 0 (no positive equilibrium).
std::optional<Equilibrium> equilibrium(const OdeParams& p);

/// Jacobian entries (a, b, c, d) of the right-hand side at (u, v).
std::array<double, 4> jacobian(const OdeParams& p, double u, double v);

struct StabilityCertificate {
    double trace = 0.0, det = 0.0;
    bool stable = false;
};

StabilityCertificate stability_certificate(const Equilibrium& eq);

/// Lyapunov coefficient K > 0 making F_u(u) + K F_v(v) nonincreasing along
/// trajectories, with F_u(u) = u - u* - u* ln(u/u*).  Midpoint of the two
/// positive roots of P(K) = C^2 K^2 - (4AD - 2BC) K + B^2; degenerate cases
/// fall back per the coefficients that vanish.  Requires
/// max(r_u - mu_u, r_v - mu_v) > 0; returns nullopt otherwise.
std::optional<double> lyapunov_K(const OdeParams& p, const Equilibrium& eq);

/// F_u(u) + K F_v(v); throws on nonpositive u or v.
double lyapunov_value(double K, const Equilibrium& eq, double u, double v);

struct OdeTrajectory {
    std::vector<double> t, u, v;
    double u_end() const { return u.back(); }
    double v_end() const { return v.back(); }
};

/// Classical RK4 with the step capped at 0.1 / ||Jacobian||_inf for
/// positivity; lands exactly on T.
OdeTrajectory integrate(const OdeParams& p, double u0, double v0, double T, double dt);

/// omega = min( -(a+d)/2 , -(a/sigma_u + d/sigma_v) / (1/sigma_u + 1/sigma_v) );
/// throws if the result is not positive (inconsistent equilibrium).
double decay_rate_omega(const Equilibrium& eq, double sigma_u, double sigma_v);

}  // namespace perwave
