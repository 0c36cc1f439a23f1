#pragma once

#include <span>
#include <vector>

#include "perwave/field.hpp"
#include "perwave/spectral.hpp"

namespace perwave {

struct MinSpeed {
    double c = 0.0;
    double lambda_star = 0.0;
    bool converged = false;
};

/// c* = inf_{lambda>0} -k(lambda)/lambda by golden section after bracket
/// expansion; a 501-point grid scan backs the bracket up if the minimizer
/// lands on an endpoint.  Throws std::domain_error when k(0) >= 0
/// ("no positive speed regime").
MinSpeed min_speed_right(const SystemSpec& spec, int N = 128);

/// Leftward analogue, inf_{lambda>0} -k(-lambda)/lambda.
MinSpeed min_speed_left(const SystemSpec& spec, int N = 128);

struct SpeedReport {
    double c_right = 0.0, c_left = 0.0;
    double lambda_star_right = 0.0, lambda_star_left = 0.0;
    double lambda1_per = 0.0, lambda1_inf = 0.0;
    bool converged = false;
    bool valid = false;  // requires lambda1_per < 0
};

SpeedReport speed_report(const SystemSpec& spec, int N = 128);

struct Crossing {
    enum class Kind { below, tangent, two_roots };
    Kind kind = Kind::below;
    std::vector<double> roots;  // 0, 1 or 2 positive solutions of lambda c = -k(lambda)
};

/// Classifies c against c* and solves lambda*c + k(lambda) = 0 by bisection
/// on each side of lambda* when c > c*.
Crossing crossing_structure(const SystemSpec& spec, double c, int N = 128);

struct PerronPair {
    double value = 0.0;
    std::vector<double> vector;  // positive, sup-normalized
};

/// Perron-Frobenius eigenpair of a constant cooperative irreducible matrix
/// (row-major d x d).  d = 2 uses the closed form; larger d uses shifted
/// power iteration.  Throws on reducible input.
PerronPair pf_constant(std::span<const double> m, int d);

/// Homogenized spreading speed
///   inf_{lambda>0} lambda_PF(lambda^2 sigma_H - lambda q_H + A_bar) / lambda
/// with sigma_H the per-species harmonic means, q_H,i = sigma_H,i * mean(q_i/sigma_i),
/// and A_bar the entrywise arithmetic means.
double homogenized_speed(const SystemSpec& spec);

/// Strong-coupling scalar reduction of a 2-species system with proportion
/// field p(x) in (0,1):
///   sigma = (1-p) sigma_u + p sigma_v,   q = (sigma_v - sigma_u) p_x,
///   r = (1-p) r_u + p r_v,               kappa = (1-p) kappa_u + p kappa_v,
/// with zeroth-order coefficient r + q_x (derivatives by centered
/// differences).  The returned scalar spec carries r + q_x as its
/// linearization; kappa is reported separately.
struct ReducedScalar {
    SystemSpec spec;
    PeriodicField kappa;
    PeriodicField r;  // plain reaction mean, before the q_x correction
};
ReducedScalar strong_coupling_reduce(const SystemSpec& spec2, const PeriodicField& p);

enum class DriftOrdering { right_faster, left_faster, equal };

/// Predicted speed ordering from the sign of the drift integral
/// int q/(2 sigma): negative -> right_faster, positive -> left_faster.
DriftOrdering drift_speed_ordering(const SystemSpec& scalar_spec, double tol = 1e-12);

/// int_0^L q(x) / (2 sigma(x)) dx / L for a scalar spec.
double drift_integral(const SystemSpec& scalar_spec);

}  // namespace perwave
