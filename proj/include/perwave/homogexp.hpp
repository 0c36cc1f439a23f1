#pragma once

#include <span>
#include <string>
#include <vector>

#include "perwave/field.hpp"
#include "perwave/pde.hpp"

namespace perwave {

struct SweepRow {
    double param = 0.0;      // epsilon (or lambda)
    double value = 0.0;      // computed quantity
    double reference = 0.0;
    double error = 0.0;      // |value - reference| (sup-norm for curve rows)
    int grid_n = 0;
    bool ok = true;
    std::string note;
};

struct SweepTable {
    std::string quantity;
    double reference = 0.0;
    std::vector<SweepRow> rows;
    bool monotone_decline = false;

    void finalize();  // fills monotone_decline from the ok rows
};

/// Spec with every coefficient field compressed to period eps * L
/// (value at x equals the base value at x / eps).
SystemSpec make_rapid_spec(const SystemSpec& spec, double eps);

/// c*_eps for each eps in a decreasing list, against the homogenized speed.
/// Eigenproblems are posed on one period of length eps*L with n_per_period
/// points, so the relative resolution is eps-independent.
SweepTable epsilon_speed_sweep(const SystemSpec& spec, std::span<const double> eps_list,
                               int n_per_period = 128);

/// The eps-coupled two-species system with mutation rates mu_u = p/eps,
/// mu_v = (1-p)/eps grafted onto spec2's diffusion/reaction data.
SystemSpec strong_coupling_spec_at(const SystemSpec& spec2, const PeriodicField& p, double eps);

/// sup_{lambda in grid} |k^eps(lambda) - k^0(lambda)| per eps, where k^0
/// comes from the strong-coupling scalar reduction.
SweepTable strong_coupling_sweep(const SystemSpec& spec2, const PeriodicField& p,
                                 std::span<const double> eps_list,
                                 std::span<const double> lambda_grid, int N = 128);

struct AnisotropyReport {
    double c_right = 0.0, c_left = 0.0;
    double integral_q_over_2sigma = 0.0;
    bool consistent = false;
};

/// Both speeds of a scalar spec plus the sign-consistency flag against
/// int q/(2 sigma) (strict whenever the integral exceeds 1e-6).
AnisotropyReport anisotropy_report(const SystemSpec& scalar_spec, int N = 128);

struct RapidoscResult {
    double deviation = 0.0;  // sup over the window of |state - (u*, v*)|
    double lambda_A_mean = 0.0;
    double u_star = 0.0, v_star = 0.0;  // homogenized equilibrium (0 when lambda_A <= 0)
};

/// Simulates the rapid mutation system from a positive bump and reports the
/// deviation from the homogenized equilibrium over the window [-w, w].
RapidoscResult rapidosc_longtime(const SystemSpec& spec, double eps, const SimConfig& config,
                                 double window_halfwidth = 5.0);

}  // namespace perwave
