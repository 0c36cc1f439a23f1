#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace perwave {

/// LU factorization with partial pivoting of a small dense d x d matrix.
class SmallLU {
public:
    SmallLU() = default;
    explicit SmallLU(std::span<const double> a, int d);  // row-major, copied

    void solve(std::span<double> b) const;  // in place
    int dim() const { return d_; }

private:
    int d_ = 0;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

/// Block-tridiagonal system with n nodes of block size d:
///   diag block D_j (dense d x d), sub/super couplings diagonal per species
///   (lo_j couples node j to j-1, up_j couples node j to j+1).
/// With `periodic` set, lo_0 couples node 0 to node n-1 and up_{n-1} couples
/// node n-1 to node 0 (bordered elimination of the last node).
/// Unknowns are node-major: x[j*d + i] is species i at node j.
class BlockTridiagSolver {
public:
    BlockTridiagSolver(int n, int d, bool periodic,
                       std::span<const double> diag,  // n*d*d, row-major blocks
                       std::span<const double> lo,    // n*d
                       std::span<const double> up);   // n*d

    void solve(std::span<double> b) const;  // in place, size n*d
    int size() const { return n_ * d_; }

private:
    void thomas_solve(std::span<double> b) const;  // interior system only

    int n_ = 0, d_ = 0;
    bool periodic_ = false;
    int m_ = 0;  // nodes in the interior (Thomas) part: n-1 if periodic else n
    std::vector<double> lo_, up_;    // n*d couplings (copies)
    std::vector<SmallLU> delta_;     // factored pivot blocks, size m
    std::vector<double> z_;          // m*d*d: T^{-1} U columns when periodic
    SmallLU schur_;                  // d x d Schur complement of the last node
};

/// Scalar tridiagonal solver with fixed coefficients, reusable across many
/// right-hand sides.  Periodic systems use the Sherman-Morrison correction.
class ScalarTridiagSolver {
public:
    ScalarTridiagSolver() = default;
    ScalarTridiagSolver(std::span<const double> lo, std::span<const double> diag,
                        std::span<const double> up, bool periodic);

    void solve(std::span<double> b) const;
    int size() const { return n_; }

private:
    void plain_solve(std::span<double> b) const;

    int n_ = 0;
    bool periodic_ = false;
    std::vector<double> lo_, up_, dinv_;  // factored: dinv = 1/pivot after elimination
    std::vector<double> corr_;            // Sherman-Morrison correction vector
    double corr_scale_ = 0.0;
    double wrap_lo_ = 0.0, wrap_up_ = 0.0;
};

double norm_inf(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace perwave
