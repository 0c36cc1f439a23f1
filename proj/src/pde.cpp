#include "perwave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perwave/ode.hpp"
#include "perwave/spectral.hpp"
#include "perwave/speed.hpp"

namespace perwave {

double SimConfig::h() const {
    return truncation_bc == TruncationBc::periodic ? (x_max - x_min) / n_x
                                                   : (x_max - x_min) / (n_x - 1);
}

void SimConfig::validate(const SystemSpec& spec) const {
    spec.validate();
    if (n_x < 128) throw std::invalid_argument("SimConfig: n_x must be at least 128");
    if (!(x_max > x_min)) throw std::invalid_argument("SimConfig: empty domain");
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("SimConfig: bad time setup");
    double qmax = 0.0;
    for (const auto& qi : spec.q) qmax = std::max(qmax, std::max(std::abs(qi.min()), std::abs(qi.max())));
    if (qmax > 0.0 && dt > 0.4 * h() / qmax)
        throw std::invalid_argument("SimConfig: advective CFL violated, need dt <= 0.4 h / max|q|");
}

double SimState::min_value() const { return *std::min_element(u.begin(), u.end()); }
double SimState::max_value() const { return *std::max_element(u.begin(), u.end()); }

Simulator::Simulator(const SystemSpec& spec, const SimConfig& config)
    : spec_(spec), config_(config) {
    config_.validate(spec_);
    const int n = config_.n_x;
    nodes_.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) nodes_[std::size_t(j)] = config_.x_min + config_.h() * j;
    rhs_.resize(std::size_t(spec_.d) * n);
    solvers_ = build_solvers(config_.dt);
    solver_dt_ = config_.dt;
}

std::vector<ScalarTridiagSolver> Simulator::build_solvers(double dt) const {
    const int n = config_.n_x;
    const double h = config_.h();
    const double inv_h2 = 1.0 / (h * h);
    const bool periodic = config_.truncation_bc == TruncationBc::periodic;

    std::vector<ScalarTridiagSolver> solvers;
    solvers.reserve(std::size_t(spec_.d));
    std::vector<double> lo(std::size_t(n), 0.0), di(std::size_t(n), 0.0), up(std::size_t(n), 0.0);
    for (int i = 0; i < spec_.d; ++i) {
        const auto& sig = spec_.sigma[std::size_t(i)];
        for (int j = 0; j < n; ++j) {
            const double x = nodes_[std::size_t(j)];
            double c_lo, c_up;
            if (spec_.form == OperatorForm::divergence) {
                c_lo = sig(x - 0.5 * h) * inv_h2;
                c_up = sig(x + 0.5 * h) * inv_h2;
            } else {
                c_lo = sig(x) * inv_h2;
                c_up = c_lo;
            }
            double a_lo = c_lo, a_up = c_up;
            if (!periodic) {  // mirror ghost at the ends (zero flux)
                if (j == 0) {
                    a_up = c_lo + c_up;
                    a_lo = 0.0;
                }
                if (j == n - 1) {
                    a_lo = c_lo + c_up;
                    a_up = 0.0;
                }
            }
            lo[std::size_t(j)] = -dt * a_lo;
            up[std::size_t(j)] = -dt * a_up;
            di[std::size_t(j)] = 1.0 + dt * (a_lo + a_up);
        }
        solvers.emplace_back(lo, di, up, periodic);
    }
    return solvers;
}

void Simulator::step_impl(SimState& state, double dt,
                          const std::vector<ScalarTridiagSolver>& solvers) const {
    const int n = config_.n_x;
    const int d = spec_.d;
    const double inv_2h = 1.0 / (2.0 * config_.h());
    const bool periodic = config_.truncation_bc == TruncationBc::periodic;

    // explicit reaction + advection
    std::vector<double> ubuf(std::size_t(d), 0.0), fbuf(std::size_t(d), 0.0);
    for (int j = 0; j < n; ++j) {
        const double x = nodes_[std::size_t(j)];
        for (int i = 0; i < d; ++i) ubuf[std::size_t(i)] = state.u[std::size_t(i) * n + j];
        spec_.reaction(x, ubuf, fbuf);
        for (int i = 0; i < d; ++i) {
            const auto sp = state.species(i);
            double ux;
            if (periodic) {
                const int jp = (j + 1 == n) ? 0 : j + 1;
                const int jm = (j == 0) ? n - 1 : j - 1;
                ux = (sp[std::size_t(jp)] - sp[std::size_t(jm)]) * inv_2h;
            } else if (j == 0 || j == n - 1) {
                ux = 0.0;  // mirror ghost
            } else {
                ux = (sp[std::size_t(j + 1)] - sp[std::size_t(j - 1)]) * inv_2h;
            }
            rhs_[std::size_t(i) * n + j] =
                sp[std::size_t(j)] +
                dt * (fbuf[std::size_t(i)] + spec_.q[std::size_t(i)](x) * ux);
        }
    }

    // clamp + implicit diffusion
    for (double& v : rhs_) {
        if (v < 0.0) {
            if (v < -1e-12) ++clamp_count_;
            v = 0.0;
        }
    }
    for (int i = 0; i < d; ++i) {
        auto slice = std::span<double>(rhs_.data() + std::size_t(i) * n, std::size_t(n));
        solvers[std::size_t(i)].solve(slice);
    }
    for (double& v : rhs_) {
        if (v < 0.0) {
            if (v < -1e-12) ++clamp_count_;
            v = 0.0;
        }
    }
    std::copy(rhs_.begin(), rhs_.end(), state.u.begin());
    state.t += dt;
}

SimState Simulator::make_state(const std::function<double(int, double)>& init) const {
    SimState s;
    s.t = 0.0;
    s.d = spec_.d;
    s.n_x = config_.n_x;
    s.u.resize(std::size_t(s.d) * s.n_x);
    for (int i = 0; i < s.d; ++i)
        for (int j = 0; j < s.n_x; ++j)
            s.u[std::size_t(i) * s.n_x + j] = init(i, nodes_[std::size_t(j)]);
    return s;
}

void Simulator::step(SimState& state) const { step_impl(state, config_.dt, solvers_); }

void Simulator::advance(SimState& state, double duration) const {
    if (duration <= 0.0) return;
    const int steps = std::max(1, int(std::ceil(duration / config_.dt - 1e-9)));
    const double dt = duration / steps;
    if (std::abs(dt - config_.dt) <= 1e-14 * config_.dt) {
        for (int s = 0; s < steps; ++s) step_impl(state, config_.dt, solvers_);
        return;
    }
    if (std::abs(dt - solver_dt_) > 1e-14 * dt || alt_solvers_.empty()) {
        alt_solvers_ = build_solvers(dt);
        solver_dt_ = dt;
    }
    for (int s = 0; s < steps; ++s) step_impl(state, dt, alt_solvers_);
}

SimState step(const SimState& state, const SystemSpec& spec, const SimConfig& config) {
    Simulator sim(spec, config);
    SimState out = state;
    sim.step(out);
    return out;
}

double front_position(const SimState& state, double delta, FrontSide side, double x_min,
                      double h) {
    if (!(delta > 0.0)) throw std::invalid_argument("front_position: delta must be positive");
    const int n = state.n_x, d = state.d;
    const auto above = [&](int j) {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) m = std::min(m, state.u[std::size_t(i) * n + j]);
        return m >= delta;
    };
    if (side == FrontSide::right) {
        for (int j = n - 1; j >= 0; --j)
            if (above(j)) return x_min + h * j;
        return -std::numeric_limits<double>::infinity();
    }
    for (int j = 0; j < n; ++j)
        if (above(j)) return x_min + h * j;
    return std::numeric_limits<double>::infinity();
}

double default_front_delta(const SystemSpec& spec) {
    const bool mutation = spec.f.mc.has_value();
    if (mutation) {
        const auto& mc = *spec.f.mc;
        OdeParams p{mean_arithmetic(mc.r_u),     mean_arithmetic(mc.r_v),
                    mean_arithmetic(mc.kappa_u), mean_arithmetic(mc.kappa_v),
                    mean_arithmetic(mc.mu_u),    mean_arithmetic(mc.mu_v)};
        if (auto eq = equilibrium(p)) return 0.01 * std::max(eq->u, eq->v);
        return 0.01;
    }
    if (spec.f.kind == Nonlinearity::Kind::lower_barrier_beta && spec.f.beta > 0.0) {
        std::vector<double> a_bar(std::size_t(spec.d) * spec.d);
        for (int i = 0; i < spec.d; ++i)
            for (int j = 0; j < spec.d; ++j)
                a_bar[std::size_t(i) * spec.d + j] = mean_arithmetic(spec.a.entry(i, j));
        const double pf = pf_constant(a_bar, spec.d).value;
        if (pf > 0.0) return 0.01 * pf / spec.f.beta;
    }
    return 0.01;
}

SimResult simulate(const SystemSpec& spec, const std::function<double(int, double)>& u0,
                   const SimConfig& config, FrontSide side) {
    Simulator sim(spec, config);
    SimState state = sim.make_state(u0);

    const double delta = config.front_delta > 0.0 ? config.front_delta : default_front_delta(spec);
    const double dt_out = config.dt_out > 0.0 ? config.dt_out : config.t_end / 200.0;

    SimResult out;
    out.trace.times.push_back(0.0);
    out.trace.positions.push_back(front_position(state, delta, side, config.x_min, config.h()));

    double t = 0.0;
    while (t < config.t_end - 1e-12) {
        const double chunk = std::min(dt_out, config.t_end - t);
        sim.advance(state, chunk);
        t = state.t;
        out.trace.times.push_back(t);
        out.trace.positions.push_back(front_position(state, delta, side, config.x_min, config.h()));
    }

    // least squares on the final half of the finite samples
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < out.trace.times.size(); ++k)
        if (std::isfinite(out.trace.positions[k]))
            pts.emplace_back(out.trace.times[k], out.trace.positions[k]);
    if (pts.size() >= 8) {
        const std::size_t start = pts.size() / 2;
        double st = 0, sx = 0, stt = 0, stx = 0;
        const double m = double(pts.size() - start);
        for (std::size_t k = start; k < pts.size(); ++k) {
            st += pts[k].first;
            sx += pts[k].second;
            stt += pts[k].first * pts[k].first;
            stx += pts[k].first * pts[k].second;
        }
        const double denom = m * stt - st * st;
        if (denom > 0.0) {
            out.trace.fitted_speed = (m * stx - st * sx) / denom;
            const double icpt = (sx - out.trace.fitted_speed * st) / m;
            double ssr = 0.0;
            for (std::size_t k = start; k < pts.size(); ++k) {
                const double r = pts[k].second - (icpt + out.trace.fitted_speed * pts[k].first);
                ssr += r * r;
            }
            out.trace.fit_residual = std::sqrt(ssr / m);
            out.trace.fit_valid = true;
        }
    }

    out.final_state = std::move(state);
    out.clamp_count = sim.clamp_count();
    return out;
}

double cooperative_eta(const SystemSpec& spec) {
    if (!spec.f.mc) return std::numeric_limits<double>::infinity();
    const auto& mc = *spec.f.mc;
    double eta = std::numeric_limits<double>::infinity();
    const std::size_t n = mc.mu_v.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double x = mc.mu_v.period() * double(j) / double(n);
        eta = std::min(eta, mc.mu_v(x) / mc.kappa_u(x));
        eta = std::min(eta, mc.mu_u(x) / mc.kappa_v(x));
    }
    return eta;
}

SystemSpec lower_barrier_spec(const SystemSpec& spec, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("lower_barrier_spec: eta must be positive");
    if (spec.f.kind == Nonlinearity::Kind::lower_barrier_beta)
        throw std::invalid_argument("lower_barrier_spec: spec is already a barrier system");

    double row_sum_max = -std::numeric_limits<double>::infinity();
    const std::size_t n = spec.a.entries.front().size();
    for (std::size_t k = 0; k < n; ++k)
        for (int i = 0; i < spec.d; ++i) {
            double s = 0.0;
            for (int j = 0; j < spec.d; ++j) s += spec.a.entry(i, j).at(k);
            row_sum_max = std::max(row_sum_max, s);
        }
    const double beta_star = row_sum_max / eta;

    SystemSpec out = spec;
    out.f.kind = Nonlinearity::Kind::lower_barrier_beta;
    out.f.base = spec.f.kind == Nonlinearity::Kind::mutation_competition
                     ? Nonlinearity::Base::mutation_competition
                     : Nonlinearity::Base::linear;
    out.f.beta = 1.1 * std::max(beta_star, 0.0);
    return out;
}

ComparisonResult comparison_experiment(const SystemSpec& spec, double eta,
                                       const std::function<double(int, double)>& u0,
                                       const SimConfig& config,
                                       std::optional<double> beta_override) {
    SystemSpec barrier = lower_barrier_spec(spec, eta);
    if (beta_override) barrier.f.beta = *beta_override;

    Simulator sim_full(spec, config);
    Simulator sim_barrier(barrier, config);
    SimState u = sim_full.make_state(u0);
    SimState v = sim_barrier.make_state(
        [&](int i, double x) { return std::min(u0(i, x), eta); });

    ComparisonResult out;
    const long steps = long(std::ceil(config.t_end / config.dt - 1e-9));
    for (long s = 0; s < steps; ++s) {
        sim_full.step(u);
        sim_barrier.step(v);
        double sup = 0.0, viol = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < u.u.size(); ++k) {
            sup = std::max(sup, v.u[k]);
            viol = std::max(viol, v.u[k] - u.u[k]);
        }
        out.barrier_sup = std::max(out.barrier_sup, sup);
        out.max_violation = std::max(out.max_violation, viol);
        if (sup > eta * (1.0 + 1e-9)) {
            out.barrier_below_eta = false;
            break;
        }
    }
    return out;
}

HairTriggerResult hair_trigger_experiment(const SystemSpec& spec, double bump_center,
                                          double bump_width, const SimConfig& config) {
    HairTriggerResult out;
    out.lambda1_inf = maximize_k(spec).second;
    if (out.lambda1_inf >= 0.0)
        throw std::domain_error("hair_trigger_experiment: lambda_1^inf >= 0, inapplicable");

    const auto bump = [&](int, double x) {
        const double z = (x - bump_center) / bump_width;
        if (std::abs(z) >= 1.0) return 0.0;
        const double c = std::cos(0.5 * M_PI * z);
        return 0.2 * c * c;
    };
    Simulator sim(spec, config);
    SimState state = sim.make_state(bump);
    sim.advance(state, config.t_end);

    double minimum = std::numeric_limits<double>::infinity();
    for (int j = 0; j < config.n_x; ++j) {
        const double x = config.x_min + config.h() * j;
        if (x < -5.0 || x > 5.0) continue;
        for (int i = 0; i < spec.d; ++i)
            minimum = std::min(minimum, state.u[std::size_t(i) * config.n_x + j]);
    }
    out.min_over_window = minimum;
    return out;
}

namespace {

std::vector<PeriodicField> eigenvector_fields(const Eigenpair& pair, int d, double period) {
    std::vector<PeriodicField> phi;
    phi.reserve(std::size_t(d));
    const int n = pair.grid_n;
    for (int i = 0; i < d; ++i) {
        std::vector<double> s(std::size_t(n), 0.0);
        for (int j = 0; j < n; ++j) s[std::size_t(j)] = pair.vector[std::size_t(j) * d + i];
        phi.emplace_back(std::move(s), period, "phi");
    }
    return phi;
}

double min_entry(const std::vector<PeriodicField>& phi) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : phi) m = std::min(m, f.min());
    return m;
}

}  // namespace

double UpperBarrier::operator()(double t, double x, int i) const {
    return std::exp(-lambda * (x - c * t)) * phi[std::size_t(i)](x);
}

UpperBarrier upper_barrier(const SystemSpec& spec, double c, double lambda, int N) {
    Eigenpair pair = k_of_lambda(spec, lambda, N);
    if (lambda * c + pair.value < -1e-12)
        throw std::domain_error("upper_barrier: needs lambda c + k(lambda) >= 0");
    UpperBarrier ub;
    ub.lambda = lambda;
    ub.c = c;
    ub.k = pair.value;
    ub.phi = eigenvector_fields(pair, spec.d, spec.period);
    return ub;
}

double LowerBarrierXi::operator()(double t, double x, int i) const {
    const double z = x - c * t;
    return std::exp(-lambda * z) * phi_lambda[std::size_t(i)](x) -
           omega * std::exp(-mu * z) * phi_mu[std::size_t(i)](x);
}

LowerBarrierXi lower_barrier_xi(const SystemSpec& spec, double c, double omega_scale, int N) {
    const Crossing cross = crossing_structure(spec, c, N);
    if (cross.kind != Crossing::Kind::two_roots)
        throw std::domain_error("lower_barrier_xi: requires c > c*");
    const double lambda = cross.roots[0];
    const double lambda2 = cross.roots[1];

    // quadratic nonlinearity remainder: beta_hat = 1
    const double beta_hat = 1.0;
    const double mu = 0.5 * (lambda + std::min(lambda * (1.0 + beta_hat), lambda2));

    Eigenpair pl = k_of_lambda(spec, lambda, N);
    Eigenpair pm = k_of_lambda(spec, mu, N);
    const double gap = pm.value + mu * c;  // k(mu) + mu c > 0 between the roots
    if (!(gap > 0.0)) throw std::runtime_error("lower_barrier_xi: k(mu) + mu c <= 0");

    LowerBarrierXi xi;
    xi.lambda = lambda;
    xi.mu = mu;
    xi.c = c;
    xi.phi_lambda = eigenvector_fields(pl, spec.d, spec.period);
    xi.phi_mu = eigenvector_fields(pm, spec.d, spec.period);

    // quadratic remainder constant of ||f - A u|| <= M ||u||^2
    double m_const = 1e-12;
    if (spec.f.mc) {
        const auto& mc = *spec.f.mc;
        m_const = std::max(2.0 * mc.kappa_u.max(), 2.0 * mc.kappa_v.max());
    }
    if (spec.f.kind == Nonlinearity::Kind::lower_barrier_beta) m_const += spec.f.beta;

    const double sup_l = 1.0;  // eigenvectors are sup-normalized
    const double inf_m = min_entry(xi.phi_mu);
    const double log_omega =
        (mu - lambda) / (beta_hat * lambda) *
            std::log(m_const * std::pow(sup_l, 1.0 + beta_hat) / (gap * inf_m)) -
        ((1.0 + beta_hat) * lambda - mu) / (beta_hat * lambda) * std::log(sup_l / inf_m);
    double omega = omega_scale * std::max(std::exp(log_omega), 1e-6);

    // raise omega until sup_x xi <= eta (cooperative validity window)
    const double eta = cooperative_eta(spec);
    const double expo = lambda / (mu - lambda);
    const double c_factor = std::pow(lambda * sup_l / (mu * inf_m), expo);
    if (std::isfinite(eta)) {
        const double need = std::pow(sup_l * c_factor / eta, (mu - lambda) / lambda);
        omega = std::max(omega, need * 1.0001);
    }
    xi.omega = omega;
    xi.sup_bound = sup_l * c_factor * std::pow(omega, -expo);
    return xi;
}

WaveProfile construct_wave(const SystemSpec& spec, double c, const WaveOptions& opts) {
    const MinSpeed ms = min_speed_right(spec);
    if (c < ms.c)
        throw std::domain_error("construct_wave: c < c*, no traveling wave exists");
    if (c < 1.05 * ms.c)
        throw std::domain_error(
            "construct_wave: speeds below 1.05 c* are not constructed (critical barrier out of "
            "reach)");

    const double L = spec.period;
    const int s = opts.nodes_per_period;  // grid shift equal to one period
    const double h = L / s;
    const int n_lo = int(std::lround(opts.m_left * L / h));
    const int n_hi = int(std::lround(opts.x_max * L / h));
    const int n_x = n_lo + n_hi + 1;

    SimConfig config;
    config.x_min = -n_lo * h;
    config.x_max = n_hi * h;
    config.n_x = n_x;
    const double period_time = L / c;
    const int steps = std::max(1, int(std::ceil(period_time / opts.dt)));
    config.dt = period_time / steps;
    config.t_end = period_time;
    config.truncation_bc = TruncationBc::neumann;

    // barriers at t = 0
    const Crossing cross = crossing_structure(spec, c);
    const double lambda1 = cross.roots.at(0);
    const UpperBarrier upper_b = upper_barrier(spec, c, lambda1);
    const LowerBarrierXi xi = lower_barrier_xi(spec, c, 2.0);

    Simulator sim(spec, config);
    const auto& x = sim.nodes();
    const int d = spec.d;

    WaveProfile wp;
    wp.c = c;
    wp.lambda_front = lambda1;
    wp.x = x;
    wp.upper.resize(std::size_t(d) * n_x);
    wp.lower.resize(std::size_t(d) * n_x);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < n_x; ++j) {
            const double xv = x[std::size_t(j)];
            wp.upper[std::size_t(i) * n_x + j] = upper_b(0.0, xv, i);
            wp.lower[std::size_t(i) * n_x + j] = std::max(xi(0.0, xv, i), 0.0);
        }

    std::vector<double> v = opts.start_from_upper ? wp.upper : wp.lower;
    if (opts.start_from_upper)  // cap the huge left values at the barrier sup window
        for (double& val : v) val = std::min(val, std::max(1.0, 2.0 * xi.sup_bound));

    std::vector<double> next(v.size());
    SimState state;
    state.d = d;
    state.n_x = n_x;

    for (int it = 1; it <= opts.max_iters; ++it) {
        state.t = 0.0;
        state.u = v;
        sim.advance(state, period_time);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < n_x; ++j) {
                const std::size_t dst = std::size_t(i) * n_x + j;
                const double raw =
                    (j + s < n_x) ? state.u[std::size_t(i) * n_x + j + s] : wp.lower[dst];
                next[dst] = std::clamp(raw, wp.lower[dst], wp.upper[dst]);
            }
        double diff = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) diff = std::max(diff, std::abs(next[k] - v[k]));
        v.swap(next);
        wp.iterations = it;
        wp.sup_diff = diff;
        if (diff < opts.tol) {
            wp.converged = true;
            break;
        }
    }
    wp.profile = v;

    // wave relation residual || u(L/c, .) - u(0, . - L) ||_inf away from the
    // truncation boundaries
    state.t = 0.0;
    state.u = v;
    sim.advance(state, period_time);
    double res = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = s; j < n_x; ++j) {
            if (x[std::size_t(j)] < config.x_min + 5.0 * L) continue;
            res = std::max(res, std::abs(state.u[std::size_t(i) * n_x + j] -
                                         v[std::size_t(i) * n_x + j - s]));
        }
    wp.wave_residual = res;

    // right-tail log-slope of species 0
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j < n_x; ++j) {
        const double val = v[std::size_t(j)];
        if (val > 1e-9 && val < 1e-4) pts.emplace_back(x[std::size_t(j)], std::log(val));
    }
    if (pts.size() >= 10) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [px, py] : pts) {
            sx += px;
            sy += py;
            sxx += px * px;
            sxy += px * py;
        }
        const double m = double(pts.size());
        wp.tail_slope = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return wp;
}

}  // namespace perwave
