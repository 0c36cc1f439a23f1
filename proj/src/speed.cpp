#include "perwave/speed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace perwave {

namespace {

constexpr double kGolden = 0.6180339887498949;

/// Golden-section minimum of f on [a, b]; assumes unimodality.
double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

MinSpeed minimize_dispersion(const std::function<double(double)>& k, double k0) {
    if (k0 >= 0.0) throw std::domain_error("min_speed: k(0) >= 0, no positive speed regime");
    const auto phi = [&](double lam) { return -k(lam) / lam; };

    // bracket the minimizer: phi -> +inf at 0+ and grows ~ beta*lambda
    double mid = 1.0, hi = 2.0;
    double f_mid = phi(mid), f_hi = phi(hi);
    while (f_hi < f_mid && hi < 1048576.0) {
        mid = hi;
        f_mid = f_hi;
        hi *= 2.0;
        f_hi = phi(hi);
    }
    if (f_hi < f_mid) throw std::runtime_error("min_speed: bracket expansion failed");
    double lo = 1e-8;

    double lam_star = golden_min(phi, lo, hi, 1e-8);

    // fallback scan when the section collapses onto an endpoint
    if (lam_star - lo < 1e-6 || hi - lam_star < 1e-6) {
        double best = lam_star, best_val = phi(lam_star);
        for (int i = 1; i <= 501; ++i) {
            const double lam = hi * double(i) / 501.0;
            const double val = phi(lam);
            if (val < best_val) {
                best_val = val;
                best = lam;
            }
        }
        const double w = hi / 501.0;
        lam_star = golden_min(phi, std::max(lo, best - w), best + w, 1e-8);
    }

    MinSpeed out;
    out.lambda_star = lam_star;
    out.c = phi(lam_star);
    out.converged = true;
    return out;
}

}  // namespace

MinSpeed min_speed_right(const SystemSpec& spec, int N) {
    const double k0 = k_of_lambda(spec, 0.0, N).value;
    return minimize_dispersion([&](double lam) { return k_of_lambda(spec, lam, N).value; }, k0);
}

MinSpeed min_speed_left(const SystemSpec& spec, int N) {
    const double k0 = k_of_lambda(spec, 0.0, N).value;
    return minimize_dispersion([&](double lam) { return k_of_lambda(spec, -lam, N).value; }, k0);
}

SpeedReport speed_report(const SystemSpec& spec, int N) {
    SpeedReport rep;
    rep.lambda1_per = k_of_lambda(spec, 0.0, N).value;
    rep.valid = rep.lambda1_per < 0.0;
    if (!rep.valid) return rep;
    const MinSpeed right = min_speed_right(spec, N);
    const MinSpeed left = min_speed_left(spec, N);
    rep.c_right = right.c;
    rep.lambda_star_right = right.lambda_star;
    rep.c_left = left.c;
    rep.lambda_star_left = left.lambda_star;
    rep.lambda1_inf = maximize_k(spec, N).second;
    rep.converged = right.converged && left.converged;
    return rep;
}

Crossing crossing_structure(const SystemSpec& spec, double c, int N) {
    const auto k = [&](double lam) { return k_of_lambda(spec, lam, N).value; };
    if (k(0.0) >= 0.0)
        throw std::domain_error("crossing_structure: requires lambda_1^per < 0");
    const MinSpeed ms = min_speed_right(spec, N);

    Crossing out;
    const double tol_c = 1e-9 * std::max(1.0, std::abs(ms.c));
    if (c < ms.c - tol_c) {
        out.kind = Crossing::Kind::below;
        return out;
    }
    if (c <= ms.c + tol_c) {
        out.kind = Crossing::Kind::tangent;
        out.roots.push_back(ms.lambda_star);
        return out;
    }

    out.kind = Crossing::Kind::two_roots;
    const auto g = [&](double lam) { return lam * c + k(lam); };  // g > 0 between the roots
    const auto bisect = [&](double a, double b) {
        // g(a), g(b) straddle zero
        double fa = g(a);
        for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
            const double m = 0.5 * (a + b);
            const double fm = g(m);
            if ((fa <= 0.0) == (fm <= 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };

    // g(0) = k(0) < 0 and g(lambda*) = lambda*(c - c*) > 0
    out.roots.push_back(bisect(1e-12, ms.lambda_star));
    double upper = 2.0 * ms.lambda_star;
    while (g(upper) > 0.0 && upper < 1048576.0) upper *= 2.0;
    if (g(upper) > 0.0) throw std::runtime_error("crossing_structure: no upper root bracket");
    out.roots.push_back(bisect(ms.lambda_star, upper));
    return out;
}

PerronPair pf_constant(std::span<const double> m, int d) {
    if (int(m.size()) != d * d) throw std::invalid_argument("pf_constant: size mismatch");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && m[std::size_t(i) * d + j] < 0.0)
                throw std::invalid_argument("pf_constant: matrix is not cooperative");

    if (d == 1) return {m[0], {1.0}};

    // irreducibility of the positivity graph
    std::vector<std::vector<bool>> reach(std::size_t(d), std::vector<bool>(std::size_t(d), false));
    for (int i = 0; i < d; ++i) {
        reach[std::size_t(i)][std::size_t(i)] = true;
        for (int j = 0; j < d; ++j)
            if (i != j && m[std::size_t(i) * d + j] > 0.0) reach[std::size_t(i)][std::size_t(j)] = true;
    }
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (reach[std::size_t(i)][std::size_t(k)] && reach[std::size_t(k)][std::size_t(j)])
                    reach[std::size_t(i)][std::size_t(j)] = true;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!reach[std::size_t(i)][std::size_t(j)])
                throw std::invalid_argument("pf_constant: matrix is reducible");

    if (d == 2) {
        const double a = m[0], b = m[1], c = m[2], dd = m[3];
        const double disc = std::sqrt((a - dd) * (a - dd) + 4.0 * b * c);
        const double lam = 0.5 * (a + dd + disc);
        std::vector<double> v{b, lam - a};
        const double sup = std::max(v[0], v[1]);
        v[0] /= sup;
        v[1] /= sup;
        return {lam, std::move(v)};
    }

    // shifted power iteration on m + s I
    double s = 1.0;
    for (int i = 0; i < d; ++i) s = std::max(s, 1.0 + std::abs(m[std::size_t(i) * d + i]));
    std::vector<double> v(std::size_t(d), 1.0), w(std::size_t(d), 0.0);
    double rho = 0.0;
    for (int it = 0; it < 200000; ++it) {
        for (int i = 0; i < d; ++i) {
            double acc = s * v[std::size_t(i)];
            for (int j = 0; j < d; ++j) acc += m[std::size_t(i) * d + j] * v[std::size_t(j)];
            w[std::size_t(i)] = acc;
        }
        double sup = 0.0;
        for (double x : w) sup = std::max(sup, std::abs(x));
        double rho_new = 0.0;
        for (int i = 0; i < d; ++i) rho_new = std::max(rho_new, w[std::size_t(i)] / v[std::size_t(i)]);
        for (int i = 0; i < d; ++i) v[std::size_t(i)] = w[std::size_t(i)] / sup;
        if (std::abs(rho_new - rho) <= 1e-14 * std::max(1.0, std::abs(rho_new)) && it > 4) {
            rho = rho_new;
            break;
        }
        rho = rho_new;
    }
    return {rho - s, std::move(v)};
}

double homogenized_speed(const SystemSpec& spec) {
    spec.validate();
    const int d = spec.d;
    std::vector<double> sigma_h(std::size_t(d), 0.0), q_h(std::size_t(d), 0.0);
    for (int i = 0; i < d; ++i) {
        const auto& sig = spec.sigma[std::size_t(i)];
        sigma_h[std::size_t(i)] = mean_harmonic(sig);
        const auto& qi = spec.q[std::size_t(i)];
        const std::size_t n = sig.size();
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += qi(sig.period() * double(j) / double(n)) / sig.at(j);
        q_h[std::size_t(i)] = sigma_h[std::size_t(i)] * acc / double(n);
    }
    std::vector<double> a_bar(std::size_t(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            a_bar[std::size_t(i) * d + j] = mean_arithmetic(spec.a.entry(i, j));

    if (pf_constant(a_bar, d).value <= 0.0)
        throw std::domain_error("homogenized_speed: mean matrix is stable, no positive speed");

    std::vector<double> mat(std::size_t(d) * d);
    const auto psi = [&](double lam) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double v = a_bar[std::size_t(i) * d + j];
                if (i == j) v += lam * lam * sigma_h[std::size_t(i)] - lam * q_h[std::size_t(i)];
                mat[std::size_t(i) * d + j] = v;
            }
        return pf_constant(mat, d).value / lam;
    };

    double mid = 1.0, hi = 2.0;
    double f_mid = psi(mid), f_hi = psi(hi);
    while (f_hi < f_mid && hi < 1048576.0) {
        mid = hi;
        f_mid = f_hi;
        hi *= 2.0;
        f_hi = psi(hi);
    }
    const double lam_star = golden_min(psi, 1e-8, hi, 1e-10);
    return psi(lam_star);
}

ReducedScalar strong_coupling_reduce(const SystemSpec& spec2, const PeriodicField& p) {
    spec2.validate();
    if (spec2.d != 2) throw std::invalid_argument("strong_coupling_reduce: needs a 2-species spec");
    if (!spec2.f.mc) throw std::invalid_argument("strong_coupling_reduce: needs the mutation model fields");
    for (double v : p.samples())
        if (!(v > 0.0 && v < 1.0))
            throw std::domain_error("strong_coupling_reduce: p must take values in (0,1)");

    const double L = spec2.period;
    const std::size_t n = p.size();
    const auto& mc = *spec2.f.mc;
    const auto& sig_u = spec2.sigma[0];
    const auto& sig_v = spec2.sigma[1];

    const PeriodicField p_x = derivative_centered(p);
    std::vector<double> sigma(n), q(n), r(n), kappa(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = L * double(j) / double(n);
        const double pj = p.at(j);
        sigma[j] = (1.0 - pj) * sig_u(x) + pj * sig_v(x);
        q[j] = (sig_v(x) - sig_u(x)) * p_x.at(j);
        r[j] = (1.0 - pj) * mc.r_u(x) + pj * mc.r_v(x);
        kappa[j] = (1.0 - pj) * mc.kappa_u(x) + pj * mc.kappa_v(x);
    }
    PeriodicField q_field(q, L, "q");
    const PeriodicField q_x = derivative_centered(q_field);
    std::vector<double> a0(n);
    for (std::size_t j = 0; j < n; ++j) a0[j] = r[j] + q_x.at(j);

    ReducedScalar out{
        make_scalar_spec(PeriodicField(sigma, L, "sigma"), std::move(q_field),
                         PeriodicField(a0, L, "r+q_x")),
        PeriodicField(kappa, L, "kappa"), PeriodicField(r, L, "r")};
    return out;
}

double drift_integral(const SystemSpec& scalar_spec) {
    if (scalar_spec.d != 1) throw std::invalid_argument("drift_integral: scalar spec required");
    const auto& sig = scalar_spec.sigma[0];
    const auto& q = scalar_spec.q[0];
    const std::size_t n = std::max(sig.size(), q.size());
    const double L = scalar_spec.period;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = L * double(j) / double(n);
        acc += q(x) / (2.0 * sig(x));
    }
    return acc / double(n);
}

DriftOrdering drift_speed_ordering(const SystemSpec& scalar_spec, double tol) {
    const double integral = drift_integral(scalar_spec);
    if (integral < -tol) return DriftOrdering::right_faster;
    if (integral > tol) return DriftOrdering::left_faster;
    return DriftOrdering::equal;
}

}  // namespace perwave
