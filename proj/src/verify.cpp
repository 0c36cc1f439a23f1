#include "perwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>

#include "perwave/homogexp.hpp"
#include "perwave/speed.hpp"
#include "perwave/spectral.hpp"

namespace perwave {

namespace {

class Checker {
public:
    Checker(VerifyReport& report, std::ostream& log, std::string spec_name)
        : report_(report), log_(log), name_(std::move(spec_name)) {}

    void operator()(const std::string& check, bool passed, const std::string& detail = "") {
        report_.checks.push_back({name_, check, passed, detail});
        if (!passed) ++report_.failures;
        log_ << (passed ? "  ok   " : "  FAIL ") << name_ << " / " << check;
        if (!detail.empty()) log_ << "  [" << detail << "]";
        log_ << '\n';
    }

private:
    VerifyReport& report_;
    std::ostream& log_;
    std::string name_;
};

PeriodicField random_positive_field(std::mt19937_64& rng, double period, std::size_t n) {
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const double a0 = unif(rng);
    double a[3], b[3];
    for (int m = 0; m < 3; ++m) {
        a[m] = unif(rng);
        b[m] = unif(rng);
    }
    return sample_function(
        [&](double x) {
            double s = a0;
            for (int m = 0; m < 3; ++m) {
                const double w = 2.0 * M_PI * (m + 1) * x / period;
                s += a[m] * std::cos(w) + b[m] * std::sin(w);
            }
            return std::exp(s);
        },
        n, period, "random_test");
}

double k_prime(const SystemSpec& spec, double lambda, int N) {
    const double h = 1e-4;
    return (k_of_lambda(spec, lambda + h, N).value - k_of_lambda(spec, lambda - h, N).value) /
           (2.0 * h);
}

}  // namespace

void verify_spec(const ParsedSpec& parsed, const std::string& name, std::uint64_t seed,
                 VerifyReport& report, std::ostream& log) {
    Checker check(report, log, name);
    const auto expect = [&](const std::string& key, bool fallback) {
        auto it = parsed.expectations.find(key);
        return it == parsed.expectations.end() ? fallback : it->second;
    };

    SystemSpec spec = parsed.spec;
    if (parsed.p) spec = strong_coupling_spec_at(spec, *parsed.p, parsed.epsilon);
    const int N = int(parsed.numeric("grid_n", 128));

    // structural assumptions
    const StructureFlags flags = check_structure(spec.a);
    check("cooperative", flags.cooperative);
    check("fully_coupled", flags.fully_coupled);

    // field means: AM-HM and rapid-scaling invariance of the diffusion fields
    for (int i = 0; i < spec.d; ++i) {
        const auto& sig = spec.sigma[std::size_t(i)];
        const double am = mean_arithmetic(sig), hm = mean_harmonic(sig);
        check("am_hm_sigma_" + std::to_string(i + 1), hm <= am + 1e-12);
        const PeriodicField rapid = make_rapid(sig, 0.25);
        check("rapid_mean_sigma_" + std::to_string(i + 1),
              std::abs(mean_arithmetic(rapid) - am) < 1e-10 &&
                  std::abs(mean_harmonic(rapid) - hm) < 1e-10);
    }

    // Perron consistency
    for (double lam : {0.0, 0.7}) {
        const Eigenpair p = k_of_lambda(spec, lam, N);
        double vmin = p.vector[0];
        for (double v : p.vector) vmin = std::min(vmin, v);
        check("perron_residual_lambda=" + std::to_string(lam), p.residual < 1e-10 && vmin > 0.0,
              "residual=" + std::to_string(p.residual));
    }

    // concavity and the quadratic cap
    const KCurve curve = k_curve(spec, -2.0, 2.0, 21, N);
    check("concavity", curve.min_concavity_margin() >= -1e-10);
    {
        double s2 = 0, s4 = 0, sk = 0, sk2 = 0;
        const double m = double(curve.lambdas.size());
        for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
            const double l2 = curve.lambdas[i] * curve.lambdas[i];
            s2 += l2;
            s4 += l2 * l2;
            sk += curve.values[i];
            sk2 += curve.values[i] * l2;
        }
        const double denom = m * s4 - s2 * s2;
        const double beta = -(m * sk2 - s2 * sk) / denom;
        check("quadratic_cap_beta_positive", beta > 0.0, "beta=" + std::to_string(beta));
    }

    // eigenvalue ordering chain with the Dirichlet tail
    const double k0 = k_of_lambda(spec, 0.0, N).value;
    const Lambda1Infinity inf = lambda1_infinity(spec, N);
    check("ordering_per_le_inf", k0 <= inf.value + 1e-9);
    bool tail_ok = true;
    for (std::size_t i = 0; i + 1 < inf.radii.size(); ++i)
        if (!(inf.dirichlet_tail[i] > inf.dirichlet_tail[i + 1])) tail_ok = false;
    check("dirichlet_tail_decreasing", tail_ok);
    check("inf_le_dirichlet", inf.value <= inf.dirichlet_tail[3] + 1e-9);
    check("tail_converged", std::abs(inf.dirichlet_tail[3] - inf.value) < 0.05,
          "gap=" + std::to_string(std::abs(inf.dirichlet_tail[3] - inf.value)));

    // minimax lower bound with seeded random positive test functions
    {
        std::mt19937_64 rng(seed);
        const double lam = 0.5;
        const double k_ref = k_of_lambda(spec, lam, N).value;
        bool ok = true;
        double worst = -1e300;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<PeriodicField> phis;
            for (int i = 0; i < spec.d; ++i)
                phis.push_back(random_positive_field(rng, spec.period, 128));
            const double bound = minimax_lower_bound(spec, lam, phis, N);
            worst = std::max(worst, bound - k_ref);
            if (bound > k_ref + 1e-10) ok = false;
        }
        check("minimax_bound", ok, "max overshoot=" + std::to_string(worst));
    }

    const bool survival = expect("survival", k0 < 0.0);
    if (k0 < 0.0) {
        const MinSpeed right = min_speed_right(spec, N);
        const MinSpeed left = min_speed_left(spec, N);
        check("speeds_converged", right.converged && left.converged);
        check("tangency_derivative",
              std::abs(right.c + k_prime(spec, right.lambda_star, N)) < 1e-5,
              "c+k'=" + std::to_string(right.c + k_prime(spec, right.lambda_star, N)));
        if (right.c > 0.0 && left.c > 0.0)
            check("speed_survival_implication", inf.value < 0.0);

        if (expect("isotropic", false)) {
            double sup = 0.0;
            for (int i = 0; i <= 8; ++i) {
                const double lam = 2.0 * double(i) / 8.0;
                sup = std::max(sup, std::abs(k_of_lambda(spec, lam, N).value -
                                             k_of_lambda(spec, -lam, N).value));
            }
            check("isotropy_k_even", sup < 1e-8, "sup=" + std::to_string(sup));
            check("isotropy_speeds", std::abs(right.c - left.c) < 1e-6);
        }
        if (expect("anisotropic", false))
            check("anisotropic_speeds", std::abs(right.c - left.c) > 1e-6,
                  "gap=" + std::to_string(right.c - left.c));

        if (spec.d == 1) {
            const double I = drift_integral(spec);
            const DriftOrdering ord = drift_speed_ordering(spec);
            bool ok = true;
            if (std::abs(I) > 1e-6)
                ok = ord == (I < 0.0 ? DriftOrdering::right_faster : DriftOrdering::left_faster) &&
                     (I < 0.0 ? right.c > left.c : left.c > right.c);
            check("drift_ordering", ok, "integral=" + std::to_string(I));
        }

        // continuity of c* in A under a 1e-3 perturbation
        {
            SystemSpec pert = spec;
            std::vector<double> s = pert.a.entry(0, 0).samples();
            for (double& v : s) v += 1e-3;
            pert.a.entry(0, 0) = PeriodicField(s, spec.period, "a11'");
            const double c_pert = min_speed_right(pert, N).c;
            check("speed_continuity_in_A", std::abs(c_pert - right.c) < 1e-2,
                  "delta=" + std::to_string(c_pert - right.c));
        }
    } else {
        check("no_positive_speed_regime", !survival, "k(0)=" + std::to_string(k0));
        bool threw = false;
        try {
            min_speed_right(spec, N);
        } catch (const std::domain_error&) {
            threw = true;
        }
        check("min_speed_rejects", threw);
    }
}

VerifyReport verify_corpus(const std::string& corpus_dir, std::uint64_t seed, std::ostream& log) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(corpus_dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("verify: no .cfg specs in " + corpus_dir);

    VerifyReport report;
    for (const auto& f : files) {
        log << f.filename().string() << ":\n";
        const ParsedSpec parsed = parse_spec(f.string());
        verify_spec(parsed, f.stem().string(), seed, report, log);
    }
    return report;
}

}  // namespace perwave
