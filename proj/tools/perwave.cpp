// perwave: spreading speeds, principal eigenvalues, homogenization limits,
// equilibria and traveling waves for spatially periodic cooperative systems.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "perwave/homogexp.hpp"
#include "perwave/ode.hpp"
#include "perwave/pde.hpp"
#include "perwave/report.hpp"
#include "perwave/specfile.hpp"
#include "perwave/speed.hpp"
#include "perwave/spectral.hpp"
#include "perwave/verify.hpp"

using json = nlohmann::ordered_json;
using namespace perwave;

namespace {

std::string out_path(const RunConfig& run, const std::string& name) {
    std::filesystem::create_directories(run.out_dir);
    return run.out_dir + "/" + name;
}

void write_json(const RunConfig& run, const std::string& name, json j) {
    std::ofstream os(out_path(run, name));
    os << j.dump(2) << '\n';
}

json base_summary(const RunConfig& run, const ParsedSpec& parsed) {
    json j;
    j["subcommand"] = run.subcommand;
    j["spec"] = parsed.source_path;
    j["spec_hash"] = parsed.hash;
    j["grid_n"] = run.grid_n;
    j["tol"] = run.tol;
    j["seed"] = run.seed;
    return j;
}

SystemSpec effective_spec(const ParsedSpec& parsed) {
    if (parsed.p) return strong_coupling_spec_at(parsed.spec, *parsed.p, parsed.epsilon);
    return parsed.spec;
}

int run_eig(const RunConfig& run, const ParsedSpec& parsed) {
    const SystemSpec spec = effective_spec(parsed);
    const KCurve curve = k_curve(spec, -3.0, 3.0, 41, run.grid_n);
    write_kcurve_csv(out_path(run, "kcurve.csv"), curve);

    const double k0 = k_of_lambda(spec, 0.0, run.grid_n).value;
    const Lambda1Infinity inf = lambda1_infinity(spec, run.grid_n);

    json j = base_summary(run, parsed);
    j["lambda1_per"] = k0;
    j["lambda1_inf"] = inf.value;
    j["argmax_lambda"] = inf.argmax;
    j["concavity_margin"] = curve.min_concavity_margin();
    for (std::size_t i = 0; i < inf.radii.size(); ++i)
        j["dirichlet_tail"].push_back({{"R", inf.radii[i]}, {"lambda1_R", inf.dirichlet_tail[i]}});
    write_json(run, "eig_summary.json", j);
    std::cout << "lambda1_per = " << format17(k0) << "\nlambda1_inf = " << format17(inf.value)
              << " at lambda = " << format17(inf.argmax) << "\n";
    return 0;
}

int run_speed(const RunConfig& run, const ParsedSpec& parsed) {
    const SystemSpec spec = effective_spec(parsed);
    const SpeedReport rep = speed_report(spec, run.grid_n);
    json j = base_summary(run, parsed);
    j["valid"] = rep.valid;
    j["lambda1_per"] = rep.lambda1_per;
    if (rep.valid) {
        j["c_right"] = rep.c_right;
        j["c_left"] = rep.c_left;
        j["lambda_star_right"] = rep.lambda_star_right;
        j["lambda_star_left"] = rep.lambda_star_left;
        j["lambda1_inf"] = rep.lambda1_inf;
        j["converged"] = rep.converged;
        const Crossing cr = crossing_structure(spec, 1.2 * rep.c_right, run.grid_n);
        json roots = json::array();
        for (double r : cr.roots) roots.push_back(r);
        j["crossing_at_1.2c"] = {{"kind", "two_roots"}, {"roots", roots}};

        std::ofstream row(out_path(run, "speed_row.csv"));
        row << "spec_hash,c_right,c_left,lambda_star_right,lambda_star_left,lambda1_per,lambda1_"
               "inf\n"
            << parsed.hash << ',' << format17(rep.c_right) << ',' << format17(rep.c_left) << ','
            << format17(rep.lambda_star_right) << ',' << format17(rep.lambda_star_left) << ','
            << format17(rep.lambda1_per) << ',' << format17(rep.lambda1_inf) << '\n';
        std::cout << "c_right = " << format17(rep.c_right)
                  << "\nc_left  = " << format17(rep.c_left) << "\n";
    } else {
        std::cout << "lambda1_per = " << format17(rep.lambda1_per)
                  << " >= 0: no positive speed regime\n";
    }
    write_json(run, "speed_summary.json", j);
    return 0;
}

int run_homogenize(const RunConfig& run, const ParsedSpec& parsed) {
    const SystemSpec spec = effective_spec(parsed);
    json j = base_summary(run, parsed);
    for (int i = 0; i < spec.d; ++i) {
        const auto& sig = spec.sigma[std::size_t(i)];
        j["sigma_harmonic"].push_back(mean_harmonic(sig));
        j["sigma_arithmetic"].push_back(mean_arithmetic(sig));
    }
    const double c_hom = homogenized_speed(spec);
    j["c_star_homogenized"] = c_hom;

    std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125};
    SweepTable table;
    if (run.workers > 1) {
        table.quantity = "c*_eps";
        table.reference = c_hom;
        std::vector<std::future<SweepRow>> futures;
        for (double eps : eps_list)
            futures.push_back(std::async(std::launch::async, [&, eps]() {
                SweepRow row;
                row.param = eps;
                row.reference = c_hom;
                row.grid_n = run.grid_n;
                try {
                    row.value = min_speed_right(make_rapid_spec(spec, eps), run.grid_n).c;
                    row.error = std::abs(row.value - c_hom);
                } catch (const std::exception& e) {
                    row.ok = false;
                    row.note = e.what();
                }
                return row;
            }));
        for (auto& f : futures) table.rows.push_back(f.get());
        table.finalize();
    } else {
        table = epsilon_speed_sweep(spec, eps_list, run.grid_n);
    }
    write_sweep_csv(out_path(run, "epsilon_sweep.csv"), table, parsed.hash, run.grid_n, run.tol);
    for (const auto& row : table.rows)
        j["epsilon_sweep"].push_back({{"eps", row.param},
                                      {"c_eps", row.value},
                                      {"error", row.error},
                                      {"ok", row.ok}});
    j["errors_monotone_decreasing"] = table.monotone_decline;
    write_json(run, "homogenize_summary.json", j);
    std::cout << "c*_hom = " << format17(c_hom) << "\n";
    return 0;
}

int run_ode(const RunConfig& run, const ParsedSpec& parsed) {
    if (!parsed.spec.f.mc)
        throw std::domain_error("ode: spec has no mutation-competition parameters");
    const auto& mc = *parsed.spec.f.mc;
    const OdeParams p{mean_arithmetic(mc.r_u),     mean_arithmetic(mc.r_v),
                      mean_arithmetic(mc.kappa_u), mean_arithmetic(mc.kappa_v),
                      mean_arithmetic(mc.mu_u),    mean_arithmetic(mc.mu_v)};
    const OdeEigen eig = lambda_A(p);

    json j = base_summary(run, parsed);
    j["lambda_A"] = eig.lambda1;
    j["lambda_2"] = eig.lambda2;
    j["phi_A"] = {eig.phi1[0], eig.phi1[1]};

    const auto eq = equilibrium(p);
    if (eq) {
        j["equilibrium"] = {{"u", eq->u}, {"v", eq->v}, {"Q", eq->Q}, {"S", eq->S}};
        const StabilityCertificate cert = stability_certificate(*eq);
        j["stability"] = {{"trace", cert.trace}, {"det", cert.det}, {"stable", cert.stable}};
        const auto K = lyapunov_K(p, *eq);
        if (K) j["lyapunov_K"] = *K;
        j["omega"] = decay_rate_omega(*eq, mean_arithmetic(parsed.spec.sigma[0]),
                                      mean_arithmetic(parsed.spec.sigma[1]));
        const OdeTrajectory traj =
            integrate(p, parsed.numeric("ode_u0", 0.1), parsed.numeric("ode_v0", 0.2),
                      parsed.numeric("ode_T", 200.0), parsed.numeric("ode_dt", 0.01));
        write_trajectory_csv(out_path(run, "trajectory.csv"), traj, &*eq, K ? *K : 1.0);
        j["endpoint"] = {{"u", traj.u_end()}, {"v", traj.v_end()}};
        std::cout << "lambda_A = " << format17(eig.lambda1) << ", equilibrium = ("
                  << format17(eq->u) << ", " << format17(eq->v) << ")\n";
    } else {
        j["equilibrium"] = nullptr;
        std::cout << "lambda_A = " << format17(eig.lambda1) << " <= 0: no positive equilibrium\n";
    }
    write_json(run, "ode_summary.json", j);
    return 0;
}

int run_simulate(const RunConfig& run, const ParsedSpec& parsed) {
    const SystemSpec spec = effective_spec(parsed);
    SimConfig config;
    config.x_min = parsed.numeric("domain_min", 0.0);
    config.x_max = parsed.numeric("domain_max", 400.0);
    config.n_x = int(parsed.numeric("n_x", 2048));
    config.dt = parsed.numeric("dt", 0.01);
    config.t_end = parsed.numeric("T", 80.0);

    const auto u0 = [&](int, double x) { return x <= config.x_min + 2.0 ? 0.5 : 0.0; };
    const SimResult res = simulate(spec, u0, config);
    write_front_csv(out_path(run, "front.csv"), res.trace);
    write_snapshot_csv(out_path(run, "final_state.csv"), res.final_state, config.x_min,
                       config.h());

    json j = base_summary(run, parsed);
    j["fitted_speed"] = res.trace.fitted_speed;
    j["fit_residual"] = res.trace.fit_residual;
    j["fit_valid"] = res.trace.fit_valid;
    j["clamp_count"] = res.clamp_count;

    try {
        SimConfig hconf = config;
        hconf.x_min = -0.5 * (config.x_max - config.x_min);
        hconf.x_max = 0.5 * (config.x_max - config.x_min);
        hconf.t_end = parsed.numeric("hair_T", 100.0);
        const HairTriggerResult ht = hair_trigger_experiment(spec, 0.0, 2.0, hconf);
        j["hair_trigger"] = {{"min_over_window", ht.min_over_window},
                             {"lambda1_inf", ht.lambda1_inf}};
    } catch (const std::domain_error& e) {
        j["hair_trigger"] = {{"skipped", e.what()}};
    }

    if (spec.f.kind == Nonlinearity::Kind::mutation_competition) {
        const double eta = 0.9 * cooperative_eta(spec);
        SimConfig cconf = config;
        cconf.t_end = std::min(config.t_end, 20.0);
        const ComparisonResult cmp = comparison_experiment(
            spec, eta, [&](int, double x) { return u0(0, x); }, cconf);
        j["comparison"] = {{"max_violation", cmp.max_violation},
                           {"barrier_sup", cmp.barrier_sup},
                           {"barrier_below_eta", cmp.barrier_below_eta}};
    }
    write_json(run, "simulate_summary.json", j);
    std::cout << "fitted front speed = " << format17(res.trace.fitted_speed) << "\n";
    return 0;
}

int run_wave(const RunConfig& run, const ParsedSpec& parsed, double wave_c_factor) {
    const SystemSpec spec = effective_spec(parsed);
    const MinSpeed ms = min_speed_right(spec, run.grid_n);
    const double c = parsed.numeric("wave_c", wave_c_factor * ms.c);

    WaveOptions opts;
    opts.tol = parsed.numeric("wave_tol", 1e-6);
    opts.max_iters = int(parsed.numeric("wave_max_iters", 500));
    const WaveProfile wave = construct_wave(spec, c, opts);

    write_wave_csv(out_path(run, "wave_profile.csv"), wave);
    json j = base_summary(run, parsed);
    j["c"] = c;
    j["c_star"] = ms.c;
    j["iterations"] = wave.iterations;
    j["sup_diff"] = wave.sup_diff;
    j["converged"] = wave.converged;
    j["wave_residual"] = wave.wave_residual;
    j["tail_slope"] = wave.tail_slope;
    j["lambda_front"] = wave.lambda_front;
    write_json(run, "wave_summary.json", j);
    std::cout << "wave at c = " << format17(c) << ": iterations = " << wave.iterations
              << ", sup_diff = " << format17(wave.sup_diff) << "\n";
    return wave.converged ? 0 : 1;
}

int run_reduce(const RunConfig& run, const ParsedSpec& parsed) {
    if (!parsed.p)
        throw std::domain_error("reduce: spec has no [strong_coupling] proportion field");
    const ReducedScalar red = strong_coupling_reduce(parsed.spec, *parsed.p);
    write_field_csv(out_path(run, "reduced_sigma.csv"), red.spec.sigma[0]);
    write_field_csv(out_path(run, "reduced_q.csv"), red.spec.q[0]);
    write_field_csv(out_path(run, "reduced_r.csv"), red.r);
    write_field_csv(out_path(run, "reduced_kappa.csv"), red.kappa);

    const AnisotropyReport rep = anisotropy_report(red.spec, run.grid_n);
    json j = base_summary(run, parsed);
    j["c_right"] = rep.c_right;
    j["c_left"] = rep.c_left;
    j["integral_q_over_2sigma"] = rep.integral_q_over_2sigma;
    j["consistent"] = rep.consistent;
    write_json(run, "reduce_summary.json", j);
    std::cout << "reduced scalar: c_right = " << format17(rep.c_right)
              << ", c_left = " << format17(rep.c_left)
              << ", drift integral = " << format17(rep.integral_q_over_2sigma) << "\n";
    return 0;
}

int run_verify(const RunConfig& run, const std::string& corpus_dir) {
    std::ostringstream log;
    const VerifyReport report = verify_corpus(corpus_dir, run.seed, log);
    std::cout << log.str();

    json j;
    j["subcommand"] = "verify";
    j["corpus"] = corpus_dir;
    j["seed"] = run.seed;
    j["checks"] = report.checks.size();
    j["failures"] = report.failures;
    for (const auto& c : report.checks)
        if (!c.passed)
            j["failed"].push_back({{"spec", c.spec_name}, {"check", c.check}, {"detail", c.detail}});
    write_json(run, "verify_summary.json", j);
    std::cout << report.checks.size() << " checks, " << report.failures << " failures\n";
    return report.failures == 0 ? 0 : 1;
}

double env_or(const char* name, double fallback) {
    const char* v = std::getenv(name);
    return v ? std::atof(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perwave: periodic reaction-diffusion spreading-speed toolkit"};
    app.require_subcommand(1);

    RunConfig run;
    run.grid_n = int(env_or("PERWAVE_GRID_N", 128));
    run.tol = env_or("PERWAVE_TOL", 1e-8);
    run.seed = std::uint64_t(env_or("PERWAVE_SEED", 20240901));
    run.workers = int(env_or("PERWAVE_WORKERS", 1));
    if (const char* v = std::getenv("PERWAVE_OUT")) run.out_dir = v;

    std::string corpus_dir = "corpus";
    double wave_c_factor = 1.2;

    app.add_option("--spec", run.spec_path, "problem description file");
    app.add_option("--out", run.out_dir, "output directory");
    app.add_option("--grid-n", run.grid_n, "grid points per period");
    app.add_option("--tol", run.tol, "generic tolerance for reports");
    app.add_option("--workers", run.workers, "worker pool size for sweeps");
    app.add_option("--seed", run.seed, "seed for randomized property suites");

    auto* eig = app.add_subcommand("eig", "k-curve, lambda1_per, lambda1_inf, Dirichlet tail");
    auto* speed = app.add_subcommand("speed", "spreading speeds and crossing diagnostics");
    auto* homog = app.add_subcommand("homogenize", "means, homogenized speed, epsilon sweep");
    auto* ode = app.add_subcommand("ode", "equilibrium, lambda_A, Lyapunov K, omega, trajectory");
    auto* sim = app.add_subcommand("simulate", "fronts, hair trigger, comparison");
    auto* wave = app.add_subcommand("wave", "Poincare traveling-wave construction");
    wave->add_option("--c-factor", wave_c_factor, "wave speed as a multiple of c*");
    auto* reduce = app.add_subcommand("reduce", "strong-coupling scalar reduction + anisotropy");
    auto* verify = app.add_subcommand("verify", "property suite over the built-in corpus");
    verify->add_option("--corpus", corpus_dir, "corpus directory");

    CLI11_PARSE(app, argc, argv);

    const auto need_spec = [&]() {
        if (run.spec_path.empty()) throw std::runtime_error("--spec is required");
        return parse_spec(run.spec_path);
    };

    try {
        if (app.got_subcommand(eig)) {
            run.subcommand = "eig";
            return run_eig(run, need_spec());
        }
        if (app.got_subcommand(speed)) {
            run.subcommand = "speed";
            return run_speed(run, need_spec());
        }
        if (app.got_subcommand(homog)) {
            run.subcommand = "homogenize";
            return run_homogenize(run, need_spec());
        }
        if (app.got_subcommand(ode)) {
            run.subcommand = "ode";
            return run_ode(run, need_spec());
        }
        if (app.got_subcommand(sim)) {
            run.subcommand = "simulate";
            return run_simulate(run, need_spec());
        }
        if (app.got_subcommand(wave)) {
            run.subcommand = "wave";
            return run_wave(run, need_spec(), wave_c_factor);
        }
        if (app.got_subcommand(reduce)) {
            run.subcommand = "reduce";
            return run_reduce(run, need_spec());
        }
        if (app.got_subcommand(verify)) {
            run.subcommand = "verify";
            return run_verify(run, corpus_dir);
        }
    } catch (const std::domain_error& e) {
        json fail{{"error", e.what()}, {"subcommand", run.subcommand}};
        std::cerr << fail.dump() << '\n';
        try {
            write_json(run, "failure.json", fail);
        } catch (...) {
        }
        return 2;
    } catch (const std::exception& e) {
        json fail{{"error", e.what()}, {"subcommand", run.subcommand}};
        std::cerr << fail.dump() << '\n';
        try {
            write_json(run, "failure.json", fail);
        } catch (...) {
        }
        return 1;
    }
    return 1;
}
