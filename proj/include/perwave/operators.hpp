#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "perwave/field.hpp"

namespace perwave {

enum class BoundaryKind { periodic, dirichlet };

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

/// Finite-difference matrix of L_lambda (+ optional coupling A) on a uniform
/// grid, stored block-tridiagonally: full d x d blocks on the node diagonal,
/// per-species scalar couplings to the neighbor nodes.  For periodic problems
/// lo[0] / up[n-1] hold the wrap entries; Dirichlet assembly drops them and
/// treats boundary values as zero.
///
/// Unknowns are node-major: v[j*d + i] is species i at node x_j = x0 + j*h.
class DiscreteOperator {
public:
    int d = 1;
    int n = 0;
    double h = 0.0;
    double x0 = 0.0;
    BoundaryKind bc = BoundaryKind::periodic;
    double lambda = 0.0;
    OperatorForm form = OperatorForm::divergence;

    std::vector<double> diag;  // n*d*d row-major blocks
    std::vector<double> lo;    // n*d
    std::vector<double> up;    // n*d

    int size() const { return n * d; }
    double node(int j) const { return x0 + h * j; }

    /// Matrix-vector product; throws on length mismatch.
    void apply(std::span<const double> v, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> v) const;

    /// Smallest off-diagonal entry of the assembled matrix (cooperativity
    /// check: nonnegative for cooperative A within the mesh Peclet limit).
    double min_offdiag() const;

    double max_abs_diag() const;

    /// Plain-text triplet dump (row col value), one entry per line.
    void dump_triplets(std::ostream& os) const;
};

/// The elliptic operator L alone (no coupling matrix), second order accurate.
/// Divergence form uses face-centered fluxes with sigma evaluated at
/// x_{j+1/2}; nondivergence uses the centered three-point stencil.  N >= 16.
DiscreteOperator assemble_L(const SystemSpec& spec, int N, BoundaryKind bc,
                            const Interval& domain);

/// L_lambda + A(x) acting on the d-species grid vector, using the expanded
/// conjugation coefficients for the chosen form.
DiscreteOperator assemble_L_lambda(const SystemSpec& spec, double lambda, int N,
                                   BoundaryKind bc, const Interval& domain);

/// Periodic assembly over one period [0, L).
DiscreteOperator assemble_L_lambda_periodic(const SystemSpec& spec, double lambda, int N);

}  // namespace perwave
