#include "perwave/homogexp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perwave/ode.hpp"
#include "perwave/speed.hpp"

namespace perwave {

void SweepTable::finalize() {
    monotone_decline = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        if (!row.ok) continue;
        if (!(row.error < prev)) monotone_decline = false;
        prev = row.error;
    }
}

SystemSpec make_rapid_spec(const SystemSpec& spec, double eps) {
    SystemSpec out = spec;
    out.period = eps * spec.period;
    for (auto& s : out.sigma) s = make_rapid(s, eps);
    for (auto& f : out.q) f = make_rapid(f, eps);
    for (auto& e : out.a.entries) e = make_rapid(e, eps);
    if (out.f.mc) {
        auto& m = *out.f.mc;
        m.r_u = make_rapid(m.r_u, eps);
        m.r_v = make_rapid(m.r_v, eps);
        m.kappa_u = make_rapid(m.kappa_u, eps);
        m.kappa_v = make_rapid(m.kappa_v, eps);
        m.mu_u = make_rapid(m.mu_u, eps);
        m.mu_v = make_rapid(m.mu_v, eps);
    }
    out.validate();
    return out;
}

SweepTable epsilon_speed_sweep(const SystemSpec& spec, std::span<const double> eps_list,
                               int n_per_period) {
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw std::invalid_argument("epsilon_speed_sweep: eps list must be decreasing");
    for (double e : eps_list)
        if (!(e > 0.0 && e <= 1.0))
            throw std::invalid_argument("epsilon_speed_sweep: eps must lie in (0, 1]");

    SweepTable table;
    table.quantity = "c*_eps";
    table.reference = homogenized_speed(spec);
    for (double eps : eps_list) {
        SweepRow row;
        row.param = eps;
        row.reference = table.reference;
        row.grid_n = n_per_period;
        try {
            const SystemSpec rapid = make_rapid_spec(spec, eps);
            row.value = min_speed_right(rapid, n_per_period).c;
            row.error = std::abs(row.value - table.reference);
        } catch (const std::exception& e) {
            row.ok = false;
            row.note = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    table.finalize();
    return table;
}

SystemSpec strong_coupling_spec_at(const SystemSpec& spec2, const PeriodicField& p, double eps) {
    if (spec2.d != 2 || !spec2.f.mc)
        throw std::invalid_argument("strong_coupling_spec_at: needs a 2-species mutation spec");
    if (!(eps > 0.0)) throw std::invalid_argument("strong_coupling_spec_at: eps must be positive");
    for (double v : p.samples())
        if (!(v > 0.0 && v < 1.0))
            throw std::domain_error("strong_coupling_spec_at: p must take values in (0,1)");

    const std::size_t n = p.size();
    const double L = p.period();
    std::vector<double> mu_u(n), mu_v(n);
    for (std::size_t j = 0; j < n; ++j) {
        mu_u[j] = p.at(j) / eps;
        mu_v[j] = (1.0 - p.at(j)) / eps;
    }
    MutationCompetition mc = *spec2.f.mc;
    mc.mu_u = PeriodicField(mu_u, L, "p/eps");
    mc.mu_v = PeriodicField(mu_v, L, "(1-p)/eps");
    return make_mutation_spec(spec2.sigma[0], spec2.sigma[1], std::move(mc), spec2.form);
}

SweepTable strong_coupling_sweep(const SystemSpec& spec2, const PeriodicField& p,
                                 std::span<const double> eps_list,
                                 std::span<const double> lambda_grid, int N) {
    const ReducedScalar reduced = strong_coupling_reduce(spec2, p);
    std::vector<double> k0(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i)
        k0[i] = k_of_lambda(reduced.spec, lambda_grid[i], N).value;

    SweepTable table;
    table.quantity = "sup |k^eps - k^0|";
    table.reference = 0.0;
    for (double eps : eps_list) {
        SweepRow row;
        row.param = eps;
        row.grid_n = N;
        try {
            const SystemSpec coupled = strong_coupling_spec_at(spec2, p, eps);
            double sup = 0.0;
            for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
                const double keps = k_of_lambda(coupled, lambda_grid[i], N).value;
                sup = std::max(sup, std::abs(keps - k0[i]));
            }
            row.value = sup;
            row.error = sup;
        } catch (const std::exception& e) {
            row.ok = false;
            row.note = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    table.finalize();
    return table;
}

AnisotropyReport anisotropy_report(const SystemSpec& scalar_spec, int N) {
    AnisotropyReport rep;
    rep.integral_q_over_2sigma = drift_integral(scalar_spec);
    rep.c_right = min_speed_right(scalar_spec, N).c;
    rep.c_left = min_speed_left(scalar_spec, N).c;
    const double I = rep.integral_q_over_2sigma;
    if (std::abs(I) > 1e-6)
        rep.consistent = I < 0.0 ? rep.c_right > rep.c_left : rep.c_left > rep.c_right;
    else
        rep.consistent = std::abs(rep.c_right - rep.c_left) < 1e-5;
    return rep;
}

RapidoscResult rapidosc_longtime(const SystemSpec& spec, double eps, const SimConfig& config,
                                 double window_halfwidth) {
    if (!spec.f.mc) throw std::invalid_argument("rapidosc_longtime: needs the mutation model");
    const auto& mc = *spec.f.mc;
    OdeParams mean{mean_arithmetic(mc.r_u),     mean_arithmetic(mc.r_v),
                   mean_arithmetic(mc.kappa_u), mean_arithmetic(mc.kappa_v),
                   mean_arithmetic(mc.mu_u),    mean_arithmetic(mc.mu_v)};

    RapidoscResult out;
    out.lambda_A_mean = lambda_A(mean).lambda1;
    if (auto eq = equilibrium(mean)) {
        out.u_star = eq->u;
        out.v_star = eq->v;
    }

    const SystemSpec rapid = make_rapid_spec(spec, eps);
    Simulator sim(rapid, config);
    SimState state = sim.make_state([&](int, double x) {
        const double z = x / 2.0;
        return std::abs(z) < 1.0 ? 0.2 * std::cos(0.5 * M_PI * z) * std::cos(0.5 * M_PI * z) : 0.0;
    });
    sim.advance(state, config.t_end);

    const double stars[2] = {out.u_star, out.v_star};
    double dev = 0.0;
    for (int j = 0; j < config.n_x; ++j) {
        const double x = config.x_min + config.h() * j;
        if (std::abs(x) > window_halfwidth) continue;
        for (int i = 0; i < 2; ++i)
            dev = std::max(dev, std::abs(state.u[std::size_t(i) * config.n_x + j] - stars[i]));
    }
    out.deviation = dev;
    return out;
}

}  // namespace perwave
