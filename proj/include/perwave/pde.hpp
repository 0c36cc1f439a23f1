#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "perwave/field.hpp"
#include "perwave/linalg.hpp"

namespace perwave {

enum class TruncationBc { neumann, periodic };

struct SimConfig {
    double x_min = 0.0, x_max = 1.0;
    int n_x = 512;
    double dt = 1e-3;
    double t_end = 1.0;
    TruncationBc truncation_bc = TruncationBc::neumann;
    double dt_out = 0.0;       // front sampling interval; 0 -> t_end / 200
    double front_delta = 0.0;  // 0 -> 0.01 * ||equilibrium||_inf (see default_front_delta)

    double h() const;
    void validate(const SystemSpec& spec) const;
};

struct SimState {
    double t = 0.0;
    int d = 1, n_x = 0;
    std::vector<double> u;  // species-major: u[i*n_x + j]

    std::span<double> species(int i) { return {u.data() + std::size_t(i) * n_x, std::size_t(n_x)}; }
    std::span<const double> species(int i) const {
        return {u.data() + std::size_t(i) * n_x, std::size_t(n_x)};
    }
    double min_value() const;
    double max_value() const;
};

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> positions;
    double fitted_speed = 0.0;
    double fit_residual = 0.0;
    bool fit_valid = false;
};

enum class FrontSide { right, left };

/// IMEX method-of-lines stepper: backward-Euler diffusion (one tridiagonal
/// solve per species, Sherman-Morrison wrap for periodic truncation),
/// explicit reaction and advection.  Negative excursions are clamped to 0;
/// clamp_count() tallies entries that went below -1e-12.
class Simulator {
public:
    Simulator(const SystemSpec& spec, const SimConfig& config);

    SimState make_state(const std::function<double(int species, double x)>& init) const;
    void step(SimState& state) const;
    void advance(SimState& state, double duration) const;  // integer steps, dt adjusted to land

    const std::vector<double>& nodes() const { return nodes_; }
    const SimConfig& config() const { return config_; }
    const SystemSpec& spec() const { return spec_; }
    long clamp_count() const { return clamp_count_; }

private:
    std::vector<ScalarTridiagSolver> build_solvers(double dt) const;
    void step_impl(SimState& state, double dt,
                   const std::vector<ScalarTridiagSolver>& solvers) const;

    SystemSpec spec_;
    SimConfig config_;
    std::vector<double> nodes_;
    std::vector<ScalarTridiagSolver> solvers_;  // one per species, matrix I - dt D
    mutable std::vector<double> rhs_;           // d*n_x workspace
    mutable long clamp_count_ = 0;
    mutable double solver_dt_ = 0.0;
    mutable std::vector<ScalarTridiagSolver> alt_solvers_;  // for partial landing steps
};

/// One IMEX step of length config.dt (convenience wrapper over Simulator).
SimState step(const SimState& state, const SystemSpec& spec, const SimConfig& config);

struct SimResult {
    SimState final_state;
    FrontTrace trace;
    long clamp_count = 0;
};

SimResult simulate(const SystemSpec& spec, const std::function<double(int, double)>& u0,
                   const SimConfig& config, FrontSide side = FrontSide::right);

/// Largest grid x with min_i u_i(x) >= delta (side = right), or the smallest
/// such x (side = left); -inf / +inf sentinel when no node qualifies.
double front_position(const SimState& state, double delta, FrontSide side, double x_min,
                      double h);

/// 0.01 * ||equilibrium||_inf for the spec's nonlinearity (mutation model:
/// ODE equilibrium of the arithmetic-mean parameters; logistic barrier:
/// max r / beta; plain linear: 1).
double default_front_delta(const SystemSpec& spec);

/// The beta-modified cooperative lower-barrier system f^-(x,u) - beta u^2
/// with beta = 1.1 * sup_x max_i sum_j a_ij(x) / eta.
SystemSpec lower_barrier_spec(const SystemSpec& spec, double eta);

/// Largest eta on which the mutation model is cooperative,
/// min(inf mu_v/kappa_u, inf mu_u/kappa_v); +inf for linear-base systems.
double cooperative_eta(const SystemSpec& spec);

struct ComparisonResult {
    double max_violation = 0.0;   // max over (t,x,i) of v_i - u_i
    double barrier_sup = 0.0;     // sup norm reached by the barrier solution
    bool barrier_below_eta = true;
};

/// Runs the full system u and the barrier system v (from initial data capped
/// at eta) in lockstep and reports the worst ordering violation.  The
/// experiment aborts (flag false) if the barrier solution leaves [0, eta].
/// beta_override replaces the 1.1 beta* default (e.g. 0 for the self-barrier
/// check inside the cooperative region).
ComparisonResult comparison_experiment(const SystemSpec& spec, double eta,
                                       const std::function<double(int, double)>& u0,
                                       const SimConfig& config,
                                       std::optional<double> beta_override = std::nullopt);

struct HairTriggerResult {
    double min_over_window = 0.0;
    double lambda1_inf = 0.0;
};

/// Evolves a compactly supported bump and reports the minimum of the state
/// over species and the window [-5, 5] at t_end.  Throws std::domain_error
/// when lambda_1^inf >= 0 (experiment inapplicable).
HairTriggerResult hair_trigger_experiment(const SystemSpec& spec, double bump_center,
                                          double bump_width, const SimConfig& config);

/// ubar(t,x) = e^{-lambda (x - c t)} phi_lambda(x), with phi the
/// sup-normalized periodic eigenvector.  Requires lambda c + k(lambda) >= 0.
struct UpperBarrier {
    double lambda = 0.0, c = 0.0, k = 0.0;
    std::vector<PeriodicField> phi;

    double operator()(double t, double x, int i) const;
};
UpperBarrier upper_barrier(const SystemSpec& spec, double c, double lambda, int N = 128);

/// xi(t,x) = e^{-lambda(x-ct)} phi_lambda(x) - omega e^{-mu(x-ct)} phi_mu(x)
/// for c > c*, lambda the smaller root of lambda c = -k(lambda), mu between
/// the roots with k(mu) + mu c > 0, omega at omega_scale times the explicit
/// admissibility bound (raised further until sup xi <= eta).
struct LowerBarrierXi {
    double lambda = 0.0, mu = 0.0, c = 0.0, omega = 0.0;
    double sup_bound = 0.0;  // upper estimate of sup_x max_i xi
    std::vector<PeriodicField> phi_lambda, phi_mu;

    double operator()(double t, double x, int i) const;
};
LowerBarrierXi lower_barrier_xi(const SystemSpec& spec, double c, double omega_scale = 2.0,
                                int N = 128);

struct WaveProfile {
    double c = 0.0;
    std::vector<double> x;
    std::vector<double> profile;        // species-major d x n_x at t = 0
    std::vector<double> upper, lower;   // barrier bounds at t = 0
    int iterations = 0;
    double sup_diff = 0.0;
    bool converged = false;
    double wave_residual = 0.0;   // || u(L/c, .) - u(0, . - L) ||_inf
    double tail_slope = 0.0;      // fitted right-tail log-slope (should be ~ -lambda)
    double lambda_front = 0.0;    // smaller crossing root lambda_1^*
};

struct WaveOptions {
    double m_left = 20.0;    // left truncation, in periods
    double x_max = 40.0;     // right truncation, in periods
    double tol = 1e-6;
    int max_iters = 500;
    int nodes_per_period = 64;
    double dt = 2e-3;
    bool start_from_upper = false;  // sensitivity check: iterate from ubar instead of xi
};

/// Poincare-map traveling wave construction: iterate
///   v <- clamp(shift_by_L(evolve(v, L/c)), [max(xi,0), ubar])
/// until successive profiles agree within tol.  Requires c >= 1.05 c*.
WaveProfile construct_wave(const SystemSpec& spec, double c, const WaveOptions& opts = {});

}  // namespace perwave
