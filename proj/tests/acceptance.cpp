// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "perwave/homogexp.hpp"
#include "perwave/ode.hpp"
#include "perwave/pde.hpp"
#include "perwave/specfile.hpp"
#include "perwave/speed.hpp"
#include "perwave/spectral.hpp"

using namespace perwave;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::string&)> body;
    double budget_seconds;
};

std::vector<ParsedSpec> load_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<ParsedSpec> specs;
    for (const auto& f : files) specs.push_back(parse_spec(f.string()));
    return specs;
}

SystemSpec effective(const ParsedSpec& p) {
    return p.p ? strong_coupling_spec_at(p.spec, *p.p, p.epsilon) : p.spec;
}

std::string short_name(const ParsedSpec& p) {
    return std::filesystem::path(p.source_path).stem().string();
}

SystemSpec mutation_constant_spec() {
    const std::size_t n = 64;
    MutationCompetition mc{PeriodicField::constant(3.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
                           PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
                           PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0)};
    return make_mutation_spec(PeriodicField::constant(1.0, n, 1.0),
                              PeriodicField::constant(1.0, n, 1.0), mc);
}

SystemSpec mutation_periodic_spec() {
    const std::size_t n = 128;
    MutationCompetition mc{
        sample_function([](double x) { return 3.0 + 0.5 * std::cos(2 * M_PI * x); }, n, 1.0),
        sample_function([](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0)};
    return make_mutation_spec(
        sample_function([](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, n, 1.0),
        PeriodicField::constant(1.0, n, 1.0), mc);
}

SystemSpec strong_coupling_base() {
    const std::size_t n = 128;
    MutationCompetition mc{PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
                           PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
                           PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0)};
    const auto sig_v =
        sample_function([](double x) { return 1.0 + 0.5 * std::cos(2 * M_PI * x); }, n, 1.0);
    return make_mutation_spec(PeriodicField::constant(1.0, n, 1.0), sig_v, mc);
}

PeriodicField proportion_field() {
    return sample_function([](double x) { return 0.5 + 0.3 * std::sin(2 * M_PI * x); }, 128, 1.0);
}

bool check(bool cond, const std::string& what, std::string& detail) {
    if (!cond && detail.size() < 600) detail += (detail.empty() ? "" : "; ") + what;
    return cond;
}

}  // namespace

int main(int argc, char** argv) {
    std::string corpus_dir = "corpus";
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--corpus") == 0 && i + 1 < argc) corpus_dir = argv[++i];
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    const std::vector<ParsedSpec> corpus = load_corpus(corpus_dir);
    std::printf("corpus: %zu specs from %s\n", corpus.size(), corpus_dir.c_str());

    std::vector<Criterion> criteria;

    criteria.push_back({1, "classical KPP speeds c* = 2 sqrt(sigma r)", [&](std::string& detail) {
        bool ok = true;
        const double cases[][2] = {{1.0, 1.0}, {2.0, 0.5}, {0.5, 2.0}};
        for (const auto& sr : cases) {
            const auto t0 = std::chrono::steady_clock::now();
            const MinSpeed ms = min_speed_right(make_scalar_kpp(sr[0], sr[1]));
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double c_exact = 2.0 * std::sqrt(sr[0] * sr[1]);
            const double l_exact = std::sqrt(sr[1] / sr[0]);
            ok &= check(std::abs(ms.c - c_exact) < 1e-6 * c_exact, "c* off", detail);
            ok &= check(std::abs(ms.lambda_star - l_exact) < 1e-6, "lambda* off", detail);
            ok &= check(dt < 1.0, "single case exceeded 1 s", detail);
        }
        return ok;
    }, 3.0});

    criteria.push_back({2, "isotropy: even k and equal speeds (cases a and b)", [&](std::string& detail) {
        bool ok = true;
        // case a: even sigma and A, q = 0, nondivergence form
        const std::size_t n = 128;
        const auto spec_a = make_scalar_spec(
            sample_function([](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, n, 1.0),
            PeriodicField::constant(0.0, n, 1.0),
            sample_function([](double x) { return 1.0 + 0.5 * std::cos(2 * M_PI * x); }, n, 1.0),
            OperatorForm::nondivergence);
        // case b: divergence form, symmetric A(x), coefficients not even in x
        SystemSpec spec_b;
        spec_b.d = 2;
        spec_b.period = 1.0;
        spec_b.sigma = {
            sample_function([](double x) { return 1.0 + 0.5 * std::sin(2 * M_PI * x); }, n, 1.0),
            sample_function([](double x) { return 2.0 + 0.4 * std::sin(4 * M_PI * x); }, n, 1.0)};
        spec_b.q = {PeriodicField::constant(0.0, n, 1.0), PeriodicField::constant(0.0, n, 1.0)};
        const auto coupling =
            sample_function([](double x) { return 0.5 + 0.2 * std::sin(2 * M_PI * x); }, n, 1.0);
        spec_b.a = MatrixField(
            2, {sample_function([](double x) { return 1.0 + 0.4 * std::sin(2 * M_PI * x); }, n, 1.0),
                coupling, coupling,
                sample_function([](double x) { return 0.8 - 0.3 * std::sin(2 * M_PI * x); }, n, 1.0)});
        spec_b.form = OperatorForm::divergence;

        int which = 0;
        const SystemSpec* both[] = {&spec_a, &spec_b};
        for (const SystemSpec* spec : both) {
            ++which;
            double sup = 0.0;
            for (int i = 0; i <= 20; ++i) {
                const double lam = 2.0 * double(i) / 20.0;
                sup = std::max(sup, std::abs(k_of_lambda(*spec, lam).value -
                                             k_of_lambda(*spec, -lam).value));
            }
            ok &= check(sup < 1e-8, "k evenness case " + std::to_string(which), detail);
            const double cr = min_speed_right(*spec).c;
            const double cl = min_speed_left(*spec).c;
            ok &= check(std::abs(cr - cl) < 1e-6, "speed equality case " + std::to_string(which),
                        detail);
        }
        return ok;
    }, 10.0});

    criteria.push_back({3, "concavity and quadratic cap on the corpus", [&](std::string& detail) {
        bool ok = true;
        for (const auto& parsed : corpus) {
            const SystemSpec spec = effective(parsed);
            const KCurve curve = k_curve(spec, -3.0, 3.0, 41);
            ok &= check(curve.min_concavity_margin() >= -1e-10,
                        "concavity " + short_name(parsed), detail);
            double s2 = 0, s4 = 0, sk = 0, sk2 = 0;
            const double m = 41.0;
            for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
                const double l2 = curve.lambdas[i] * curve.lambdas[i];
                s2 += l2;
                s4 += l2 * l2;
                sk += curve.values[i];
                sk2 += curve.values[i] * l2;
            }
            const double beta = -(m * sk2 - s2 * sk) / (m * s4 - s2 * s2);
            ok &= check(beta > 0.0, "cap beta " + short_name(parsed), detail);
            const double alpha_fit = (sk + beta * s2) / m;
            double shift = 0.0;
            for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
                shift = std::max(shift, curve.values[i] -
                                            (alpha_fit - beta * curve.lambdas[i] * curve.lambdas[i]));
            for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
                ok &= check(curve.values[i] <= alpha_fit + shift + 1e-12 -
                                                    beta * curve.lambdas[i] * curve.lambdas[i],
                            "cap dominates " + short_name(parsed), detail);
        }
        return ok;
    }, 30.0});

    criteria.push_back({4, "eigenvalue ordering chain with Dirichlet tail", [&](std::string& detail) {
        bool ok = true;
        for (const auto& parsed : corpus) {
            const SystemSpec spec = effective(parsed);
            const double k0 = k_of_lambda(spec, 0.0).value;
            const Lambda1Infinity inf = lambda1_infinity(spec);
            ok &= check(k0 <= inf.value + 1e-9, "per<=inf " + short_name(parsed), detail);
            for (std::size_t i = 0; i + 1 < inf.radii.size(); ++i)
                ok &= check(inf.dirichlet_tail[i] > inf.dirichlet_tail[i + 1],
                            "tail decreasing " + short_name(parsed), detail);
            ok &= check(inf.value <= inf.dirichlet_tail[3] + 1e-9,
                        "inf<=dirichlet " + short_name(parsed), detail);
            ok &= check(std::abs(inf.dirichlet_tail[3] - inf.value) < 0.05,
                        "tail gap " + short_name(parsed), detail);
        }
        return ok;
    }, 60.0});

    criteria.push_back({5, "homogenization of piecewise sigma {1,4}", [&](std::string& detail) {
        std::vector<double> pw(128);
        for (int j = 0; j < 128; ++j) pw[std::size_t(j)] = j < 64 ? 1.0 : 4.0;
        const auto spec = make_scalar_spec(sample_field(pw, 1.0), PeriodicField::constant(0.0, 128, 1.0),
                                           PeriodicField::constant(1.0, 128, 1.0));
        const std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125};
        const SweepTable table = epsilon_speed_sweep(spec, eps, 128);
        bool ok = true;
        for (const auto& row : table.rows) ok &= check(row.ok, "row failed", detail);
        ok &= check(table.monotone_decline, "errors not strictly decreasing", detail);
        const double c_hom = 2.0 * std::sqrt(1.6);
        ok &= check(std::abs(table.reference - c_hom) < 1e-2, "reference off", detail);
        ok &= check(table.rows.back().error < 0.02 * table.reference, "final error >= 2%", detail);
        if (!ok) {
            for (const auto& row : table.rows)
                detail += " e(" + std::to_string(row.param) + ")=" + std::to_string(row.error);
        }
        return ok;
    }, 120.0});

    criteria.push_back({6, "ODE battery on 10 randomized unstable parameter sets", [&](std::string& detail) {
        bool ok = true;
        std::mt19937_64 rng(314159);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        int done = 0;
        while (done < 10) {
            const OdeParams p{4.0 * unif(rng) - 1.0, 4.0 * unif(rng) - 1.0,
                              0.2 + 2.0 * unif(rng),  0.2 + 2.0 * unif(rng),
                              0.1 + 1.5 * unif(rng),  0.1 + 1.5 * unif(rng)};
            if (lambda_A(p).lambda1 <= 0.05) continue;
            ++done;
            const auto eq = equilibrium(p);
            if (!check(eq.has_value(), "equilibrium missing", detail)) { ok = false; continue; }
            const auto r = p.rhs(eq->u, eq->v);
            ok &= check(std::max(std::abs(r[0]), std::abs(r[1])) < 1e-12, "residual", detail);
            const auto cert = stability_certificate(*eq);
            ok &= check(cert.trace < 0.0 && cert.det > 0.0, "stability", detail);

            const OdeTrajectory traj = integrate(p, 0.1, 0.2, 200.0, 0.02);
            ok &= check(std::abs(traj.u_end() - eq->u) < 1e-6 &&
                            std::abs(traj.v_end() - eq->v) < 1e-6,
                        "endpoint", detail);

            if (std::max(p.r_u - p.mu_u, p.r_v - p.mu_v) > 0.0) {
                const auto K = lyapunov_K(p, *eq);
                ok &= check(K.has_value(), "lyapunov K missing", detail);
                if (K) {
                    double prev = lyapunov_value(*K, *eq, traj.u[0], traj.v[0]);
                    for (std::size_t i = 1; i < traj.t.size(); ++i) {
                        const double cur = lyapunov_value(*K, *eq, traj.u[i], traj.v[i]);
                        if (!(cur <= prev + 1e-12)) {
                            ok = check(false, "lyapunov increase", detail);
                            break;
                        }
                        prev = cur;
                    }
                }
            }
        }
        return ok;
    }, 10.0});

    criteria.push_back({7, "linear determinacy: simulated front speeds", [&](std::string& detail) {
        bool ok = true;
        // constant coefficients: within 3%
        {
            const auto spec = mutation_constant_spec();
            const double c_star = min_speed_right(spec).c;
            SimConfig config{0.0, 400.0, 2048, 0.01, 80.0};
            const SimResult res =
                simulate(spec, [](int, double x) { return x <= 2.0 ? 0.5 : 0.0; }, config);
            ok &= check(res.trace.fit_valid, "fit invalid (const)", detail);
            ok &= check(std::abs(res.trace.fitted_speed - c_star) < 0.03 * c_star,
                        "const speed: got " + std::to_string(res.trace.fitted_speed) +
                            " want " + std::to_string(c_star), detail);
        }
        // periodic coefficients: within 5%
        {
            const auto spec = mutation_periodic_spec();
            const double c_star = min_speed_right(spec).c;
            SimConfig config{0.0, 400.0, 2048, 0.01, 80.0};
            const SimResult res =
                simulate(spec, [](int, double x) { return x <= 2.0 ? 0.5 : 0.0; }, config);
            ok &= check(res.trace.fit_valid, "fit invalid (periodic)", detail);
            ok &= check(std::abs(res.trace.fitted_speed - c_star) < 0.05 * c_star,
                        "periodic speed: got " + std::to_string(res.trace.fitted_speed) +
                            " want " + std::to_string(c_star), detail);
        }
        return ok;
    }, 180.0});

    criteria.push_back({8, "strong-coupling anisotropy at eps = 0.05", [&](std::string& detail) {
        const auto base = strong_coupling_base();
        const auto p = proportion_field();
        const SystemSpec coupled = strong_coupling_spec_at(base, p, 0.05);
        const double cr = min_speed_right(coupled).c;
        const double cl = min_speed_left(coupled).c;
        bool ok = check(cl - cr > 10.0 * 1e-8,
                        "gap " + std::to_string(cl - cr) + " too small", detail);
        const ReducedScalar red = strong_coupling_reduce(base, p);
        const double I = drift_integral(red.spec);
        const double crr = min_speed_right(red.spec).c;
        const double cll = min_speed_left(red.spec).c;
        ok &= check(I > 0.0 ? cll > crr : crr > cll, "reduced ordering", detail);
        ok &= check(I > 0.0 ? cl > cr : cr > cl, "coupled ordering matches integral", detail);
        return ok;
    }, 120.0});

    criteria.push_back({9, "strong-coupling spectral convergence", [&](std::string& detail) {
        const auto base = strong_coupling_base();
        const auto p = proportion_field();
        std::vector<double> lambdas;
        for (int i = 0; i <= 16; ++i) lambdas.push_back(-2.0 + 4.0 * i / 16.0);
        const std::vector<double> eps{0.2, 0.1, 0.05};
        const SweepTable table = strong_coupling_sweep(base, p, eps, lambdas);
        bool ok = true;
        for (const auto& row : table.rows) ok &= check(row.ok, "row failed", detail);
        for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
            ok &= check(table.rows[i + 1].error < table.rows[i].error,
                        "sup error not decreasing", detail);
        if (!ok)
            for (const auto& row : table.rows)
                detail += " sup(" + std::to_string(row.param) + ")=" + std::to_string(row.error);
        return ok;
    }, 120.0});

    criteria.push_back({10, "traveling wave at c = 1.2 c*", [&](std::string& detail) {
        const auto spec = mutation_constant_spec();
        const double c_star = min_speed_right(spec).c;
        WaveOptions opts;
        const WaveProfile wave = construct_wave(spec, 1.2 * c_star, opts);
        bool ok = check(wave.converged && wave.sup_diff < 1e-6, "no convergence", detail);
        ok &= check(wave.iterations <= 500, "too many iterations", detail);
        ok &= check(wave.wave_residual < 1e-4,
                    "wave residual " + std::to_string(wave.wave_residual), detail);
        bool sandwich = true;
        for (std::size_t k = 0; k < wave.profile.size(); ++k)
            sandwich &= wave.profile[k] >= wave.lower[k] - 1e-12 &&
                        wave.profile[k] <= wave.upper[k] + 1e-12;
        ok &= check(sandwich, "barrier sandwich", detail);
        ok &= check(std::abs(wave.tail_slope - wave.lambda_front) < 0.05 * wave.lambda_front,
                    "tail slope " + std::to_string(wave.tail_slope) + " vs lambda " +
                        std::to_string(wave.lambda_front), detail);
        return ok;
    }, 120.0});

    criteria.push_back({11, "hair trigger and extinction", [&](std::string& detail) {
        bool ok = true;
        {
            const auto spec = mutation_constant_spec();
            SimConfig config{-60.0, 60.0, 1536, 0.01, 100.0};
            const HairTriggerResult ht = hair_trigger_experiment(spec, 0.0, 2.0, config);
            ok &= check(ht.lambda1_inf < 0.0, "lambda1_inf sign", detail);
            ok &= check(ht.min_over_window > 0.0,
                        "window min " + std::to_string(ht.min_over_window), detail);
        }
        {
            const std::size_t n = 64;
            MutationCompetition dead{
                PeriodicField::constant(-1.0, n, 1.0), PeriodicField::constant(-0.5, n, 1.0),
                PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0),
                PeriodicField::constant(1.0, n, 1.0), PeriodicField::constant(1.0, n, 1.0)};
            const auto spec = make_mutation_spec(PeriodicField::constant(1.0, n, 1.0),
                                                 PeriodicField::constant(1.0, n, 1.0), dead);
            SimConfig config{-30.0, 30.0, 512, 0.01, 60.0};
            Simulator sim(spec, config);
            SimState s = sim.make_state([](int, double) { return 0.5; });
            sim.advance(s, config.t_end);
            ok &= check(s.max_value() < 1e-6, "no extinction: " + std::to_string(s.max_value()),
                        detail);
        }
        return ok;
    }, 120.0});

    criteria.push_back({12, "comparison principle violation < 1e-10", [&](std::string& detail) {
        bool ok = true;
        for (const auto& parsed : corpus) {
            const SystemSpec spec = effective(parsed);
            if (spec.f.kind != Nonlinearity::Kind::mutation_competition) continue;
            const double eta = 0.9 * cooperative_eta(spec);
            if (!(eta > 0.0) || !std::isfinite(eta)) continue;
            SimConfig config{-20.0, 20.0, 512, 2e-3, 10.0};
            const ComparisonResult res = comparison_experiment(
                spec, eta, [](int, double x) { return std::abs(x) < 3.0 ? 0.4 : 0.0; }, config);
            ok &= check(res.barrier_below_eta, "barrier left [0,eta] " + short_name(parsed), detail);
            ok &= check(res.max_violation < 1e-10,
                        "violation " + std::to_string(res.max_violation) + " " + short_name(parsed),
                        detail);
        }
        return ok;
    }, 60.0});

    int failures = 0;
    for (const auto& crit : criteria) {
        if (only != 0 && crit.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = crit.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > crit.budget_seconds) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
        }
        std::printf("[%2d] %s  %-55s (%.1fs)%s%s\n", crit.id, ok ? "PASS" : "FAIL",
                    crit.title.c_str(), secs, detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
