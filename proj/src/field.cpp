#include "perwave/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perwave {

namespace {

void check_samples(const std::vector<double>& s, double period, const std::string& label) {
    if (s.size() < 8)
        throw std::invalid_argument("field '" + label + "': needs at least 8 samples, got " +
                                    std::to_string(s.size()));
    if (!(period > 0.0) || !std::isfinite(period))
        throw std::invalid_argument("field '" + label + "': period must be positive");
    for (double v : s)
        if (!std::isfinite(v))
            throw std::invalid_argument("field '" + label + "': non-finite sample");
}

}  // namespace

PeriodicField::PeriodicField(std::vector<double> samples, double period, std::string label)
    : period_(period), samples_(std::move(samples)), label_(std::move(label)) {
    check_samples(samples_, period_, label_);
}

PeriodicField PeriodicField::constant(double value, std::size_t n, double period,
                                      std::string label) {
    return PeriodicField(std::vector<double>(n, value), period, std::move(label));
}

double PeriodicField::operator()(double x) const {
    const std::size_t n = samples_.size();
    double t = std::fmod(x, period_);
    if (t < 0.0) t += period_;
    double s = t / period_ * double(n);  // in [0, n)
    if (s >= double(n)) s = 0.0;         // guard fmod round-up
    const std::size_t j = std::size_t(s);
    const double w = s - double(j);
    const std::size_t jn = (j + 1 == n) ? 0 : j + 1;
    return (1.0 - w) * samples_[j] + w * samples_[jn];
}

double PeriodicField::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double PeriodicField::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

void PeriodicField::require_positive(const std::string& what) const {
    for (std::size_t j = 0; j < samples_.size(); ++j)
        if (!(samples_[j] > 0.0))
            throw std::invalid_argument(what + " must be positive; sample " + std::to_string(j) +
                                        " of '" + label_ + "' is " + std::to_string(samples_[j]));
}

PeriodicField sample_field(std::span<const double> values_on_grid, double period,
                           std::string label) {
    return PeriodicField(std::vector<double>(values_on_grid.begin(), values_on_grid.end()),
                         period, std::move(label));
}

double mean_arithmetic(const PeriodicField& f) {
    double acc = 0.0;
    for (double v : f.samples()) acc += v;
    return acc / double(f.size());
}

double mean_harmonic(const PeriodicField& f) {
    f.require_positive("harmonic mean argument");
    double acc = 0.0;
    for (double v : f.samples()) acc += 1.0 / v;
    return double(f.size()) / acc;
}

PeriodicField make_rapid(const PeriodicField& f, double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("make_rapid: eps must lie in (0, 1]");
    // value at x is f(x/eps); on the compressed grid x_j = j*(eps L)/N the
    // argument x_j/eps hits the original nodes, so samples carry over.
    return PeriodicField(f.samples(), eps * f.period(), f.label());
}

PeriodicField derivative_centered(const PeriodicField& f) {
    const std::size_t n = f.size();
    const double h = f.period() / double(n);
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t jp = (j + 1 == n) ? 0 : j + 1;
        const std::size_t jm = (j == 0) ? n - 1 : j - 1;
        d[j] = (f.at(jp) - f.at(jm)) / (2.0 * h);
    }
    return PeriodicField(std::move(d), f.period(), f.label() + "'");
}

MatrixField::MatrixField(int dim, std::vector<PeriodicField> fields)
    : d(dim), entries(std::move(fields)) {
    if (d < 1 || entries.size() != std::size_t(d) * std::size_t(d))
        throw std::invalid_argument("MatrixField: needs d*d entries");
    const double L = entries.front().period();
    const std::size_t n = entries.front().size();
    for (const auto& e : entries)
        if (e.period() != L || e.size() != n)
            throw std::invalid_argument("MatrixField: entries must share one period and grid");
}

MatrixField MatrixField::constant(int dim, std::span<const double> values, std::size_t n,
                                  double period) {
    if (values.size() != std::size_t(dim) * std::size_t(dim))
        throw std::invalid_argument("MatrixField::constant: wrong value count");
    std::vector<PeriodicField> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(PeriodicField::constant(v, n, period));
    return MatrixField(dim, std::move(fields));
}

MatrixField MatrixField::scalar(PeriodicField f) {
    std::vector<PeriodicField> fields;
    fields.push_back(std::move(f));
    return MatrixField(1, std::move(fields));
}

StructureFlags check_structure(const MatrixField& a, double nu, int window) {
    const int d = a.d;
    const int n = int(a.entries.front().size());
    if (!(nu > 0.0)) throw std::invalid_argument("check_structure: nu must be positive");
    if (window < 1 || window >= n)
        throw std::invalid_argument("check_structure: window must satisfy 1 <= w < N");

    StructureFlags flags;
    flags.cooperative = true;
    for (int i = 0; i < d && flags.cooperative; ++i)
        for (int j = 0; j < d && flags.cooperative; ++j) {
            if (i == j) continue;
            for (double v : a.entry(i, j).samples())
                if (v < 0.0) {
                    flags.cooperative = false;
                    break;
                }
        }

    // Edge i->j iff some run of `window` consecutive samples (with periodic
    // wrap) of a_ij all reach nu.  Diagonal arcs are free.
    std::vector<std::vector<bool>> edge(d, std::vector<bool>(d, false));
    for (int i = 0; i < d; ++i) {
        edge[i][i] = true;
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const auto& s = a.entry(i, j).samples();
            int run = 0;
            for (int k = 0; k < n + window - 1; ++k) {
                if (s[std::size_t(k % n)] >= nu) {
                    if (++run >= window) {
                        edge[i][j] = true;
                        break;
                    }
                } else {
                    run = 0;
                }
            }
        }
    }

    // Strong connectivity by transitive closure (d is small).
    auto reach = edge;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    flags.fully_coupled = true;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!reach[i][j]) flags.fully_coupled = false;
    if (d == 1) flags.fully_coupled = true;
    return flags;
}

void SystemSpec::validate() const {
    if (d < 1) throw std::invalid_argument("SystemSpec: d must be >= 1");
    if (sigma.size() != std::size_t(d) || q.size() != std::size_t(d))
        throw std::invalid_argument("SystemSpec: needs d diffusion and d advection fields");
    if (a.d != d) throw std::invalid_argument("SystemSpec: linearization dimension mismatch");
    for (const auto& s : sigma) {
        s.require_positive("diffusion coefficient");
        if (s.period() != period) throw std::invalid_argument("SystemSpec: period mismatch");
    }
    for (const auto& f : q)
        if (f.period() != period) throw std::invalid_argument("SystemSpec: period mismatch");
    if (a.period() != period) throw std::invalid_argument("SystemSpec: period mismatch");

    const bool uses_mc = f.kind == Nonlinearity::Kind::mutation_competition ||
                         (f.kind == Nonlinearity::Kind::lower_barrier_beta &&
                          f.base == Nonlinearity::Base::mutation_competition);
    if (uses_mc) {
        if (d != 2) throw std::invalid_argument("mutation model requires d = 2");
        if (!f.mc) throw std::invalid_argument("mutation model fields missing");
        f.mc->kappa_u.require_positive("kappa_u");
        f.mc->kappa_v.require_positive("kappa_v");
        f.mc->mu_u.require_positive("mu_u");
        f.mc->mu_v.require_positive("mu_v");
    }
}

void SystemSpec::reaction(double x, std::span<const double> u, std::span<double> out) const {
    switch (f.kind) {
        case Nonlinearity::Kind::linear: {
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int j = 0; j < d; ++j) acc += a(i, j, x) * u[std::size_t(j)];
                out[std::size_t(i)] = acc;
            }
            return;
        }
        case Nonlinearity::Kind::mutation_competition: {
            const auto& m = *f.mc;
            const double uu = u[0], vv = u[1];
            out[0] = (m.r_u(x) - m.kappa_u(x) * (uu + vv)) * uu + m.mu_v(x) * vv - m.mu_u(x) * uu;
            out[1] = (m.r_v(x) - m.kappa_v(x) * (uu + vv)) * vv + m.mu_u(x) * uu - m.mu_v(x) * vv;
            return;
        }
        case Nonlinearity::Kind::lower_barrier_beta: {
            if (f.base == Nonlinearity::Base::linear) {
                for (int i = 0; i < d; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < d; ++j) acc += a(i, j, x) * u[std::size_t(j)];
                    out[std::size_t(i)] = acc - f.beta * u[std::size_t(i)] * u[std::size_t(i)];
                }
            } else {
                const auto& m = *f.mc;
                const double uu = u[0], vv = u[1];
                out[0] = (m.r_u(x) - m.kappa_u(x) * (uu + vv)) * uu + m.mu_v(x) * vv -
                         m.mu_u(x) * uu - f.beta * uu * uu;
                out[1] = (m.r_v(x) - m.kappa_v(x) * (uu + vv)) * vv + m.mu_u(x) * uu -
                         m.mu_v(x) * vv - f.beta * vv * vv;
            }
            return;
        }
    }
}

MatrixField mutation_linearization(const MutationCompetition& mc, double period) {
    const std::size_t n = mc.r_u.size();
    auto sub = [&](const PeriodicField& a, const PeriodicField& b, std::string label) {
        std::vector<double> s(n);
        for (std::size_t j = 0; j < n; ++j) s[j] = a.at(j) - b.at(j);
        return PeriodicField(std::move(s), period, std::move(label));
    };
    std::vector<PeriodicField> e;
    e.push_back(sub(mc.r_u, mc.mu_u, "r_u-mu_u"));
    e.push_back(mc.mu_v);
    e.push_back(mc.mu_u);
    e.push_back(sub(mc.r_v, mc.mu_v, "r_v-mu_v"));
    return MatrixField(2, std::move(e));
}

SystemSpec make_scalar_spec(PeriodicField sigma, PeriodicField q, PeriodicField r,
                            OperatorForm form) {
    SystemSpec spec;
    spec.d = 1;
    spec.period = sigma.period();
    spec.sigma.push_back(std::move(sigma));
    spec.q.push_back(std::move(q));
    spec.a = MatrixField::scalar(std::move(r));
    spec.form = form;
    spec.validate();
    return spec;
}

SystemSpec make_scalar_kpp(double sigma, double r, std::size_t n, double period) {
    auto spec = make_scalar_spec(PeriodicField::constant(sigma, n, period, "sigma"),
                                 PeriodicField::constant(0.0, n, period, "q"),
                                 PeriodicField::constant(r, n, period, "r"));
    spec.f.kind = Nonlinearity::Kind::lower_barrier_beta;
    spec.f.base = Nonlinearity::Base::linear;
    spec.f.beta = r > 0.0 ? r : 1.0;  // logistic saturation u(r - beta u)
    return spec;
}

SystemSpec make_mutation_spec(PeriodicField sigma_u, PeriodicField sigma_v,
                              MutationCompetition mc, OperatorForm form) {
    SystemSpec spec;
    spec.d = 2;
    spec.period = sigma_u.period();
    spec.sigma.push_back(std::move(sigma_u));
    spec.sigma.push_back(std::move(sigma_v));
    const std::size_t n = spec.sigma.front().size();
    spec.q.push_back(PeriodicField::constant(0.0, n, spec.period, "q_u"));
    spec.q.push_back(PeriodicField::constant(0.0, n, spec.period, "q_v"));
    spec.a = mutation_linearization(mc, spec.period);
    spec.form = form;
    spec.f.kind = Nonlinearity::Kind::mutation_competition;
    spec.f.mc = std::move(mc);
    spec.validate();
    return spec;
}

}  // namespace perwave
