#pragma once

#include <array>
#include <span>
#include <vector>

#include "perwave/operators.hpp"

namespace perwave {

/// Principal eigenpair of -B on the grid: -B phi = value * phi with phi > 0,
/// sup-normalized.  residual = ||B phi + value*phi||_inf.
struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    int iterations = 0;
    int grid_n = 0;
};

struct EigenOptions {
    int max_iter = 50000;
    double tol_residual = 1e-10;
    double tol_value = 1e-12;  // relative Collatz-Wielandt bracket width
};

/// Principal eigenvalue of -B for an operator B = L_lambda + A assembled from
/// a cooperative, fully coupled A.
///
/// The Perron root mu of B is pinned by Collatz-Wielandt brackets
///   min_i (B phi)_i / phi_i  <=  mu  <=  max_i (B phi)_i / phi_i
/// (valid for every positive phi) and computed by inverse power iteration on
/// the M-matrix t I - B with t slightly above the current upper bracket; the
/// shift is re-tightened as the bracket contracts.  Solving an M-matrix
/// system with positive right-hand side keeps the iterates positive, so a
/// non-positive iterate signals broken cooperativity.  Returns value = -mu.
Eigenpair principal_eigen(const DiscreteOperator& op, const EigenOptions& opts = {});

/// k(lambda): principal periodic eigenvalue of -L_lambda - A(x).
/// Starts from N points per period and doubles the grid while the N vs 2N
/// eigenvalue gap exceeds 1e-6 (the returned pair lives on the finest grid).
Eigenpair k_of_lambda(const SystemSpec& spec, double lambda, int N = 128,
                      const EigenOptions& opts = {});

struct KCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    std::vector<double> residuals;

    /// Midpoint concavity margin: min over interior triples of
    /// k(mid) - (k(left)+k(right))/2 (>= -tol for a concave curve).
    double min_concavity_margin() const;
};

/// Sampled dispersion curve on M >= 5 uniformly spaced lambdas.
KCurve k_curve(const SystemSpec& spec, double lambda_min, double lambda_max, int M,
               int N = 128);

struct DirichletEigen {
    Eigenpair pair;          // fine-grid (2N+1 interior nodes) solve
    double value = 0.0;      // Richardson-extrapolated eigenvalue
    double value_coarse = 0.0;
    double radius = 0.0;
};

/// Principal Dirichlet eigenvalue on (-R, R) with N interior nodes; the
/// returned value is the (N, 2N+1) Richardson extrapolation (the raw
/// second-order values sit a few 1e-6 off at N = 512).
DirichletEigen lambda1_dirichlet(const SystemSpec& spec, double R, int N = 512,
                                 const EigenOptions& opts = {});

struct Lambda1Infinity {
    double value = 0.0;    // max_lambda k(lambda)
    double argmax = 0.0;
    std::array<double, 4> radii{};
    std::array<double, 4> dirichlet_tail{};  // lambda_1^R for R in {2,4,8,16} L
};

/// lambda_1^infty = max_lambda k(lambda), by golden-section on the concave
/// curve after bracket expansion; the Dirichlet tail is a diagnostic only.
Lambda1Infinity lambda1_infinity(const SystemSpec& spec, int N = 128,
                                 bool with_dirichlet_tail = true);

/// Golden-section maximizer of k(lambda); returns {argmax, max}.
std::pair<double, double> maximize_k(const SystemSpec& spec, int N = 128,
                                     double tol_lambda = 1e-8);

/// inf over grid points and species of (-B phi)_i / phi_i for a positive
/// test vector phi; a lower bound for k(lambda) when B = L_lambda + A.
double minimax_lower_bound(const DiscreteOperator& op, std::span<const double> phi_test);

/// Convenience overload sampling d positive periodic test fields onto the
/// assembly grid.
double minimax_lower_bound(const SystemSpec& spec, double lambda,
                           std::span<const PeriodicField> phi_test, int N = 128);

}  // namespace perwave
