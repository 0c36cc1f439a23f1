#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace perwave {

/// One L-periodic scalar coefficient, stored as uniform samples on
/// x_j = j*L/N, j = 0..N-1.  Evaluation at arbitrary x wraps x into
/// [0, L) and interpolates linearly between neighboring nodes (the
/// segment [x_{N-1}, L) interpolates back to sample 0).
class PeriodicField {
public:
    PeriodicField() = default;
    PeriodicField(std::vector<double> samples, double period, std::string label = "");

    static PeriodicField constant(double value, std::size_t n, double period,
                                  std::string label = "");

    double period() const { return period_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    const std::string& label() const { return label_; }

    double at(std::size_t j) const { return samples_[j]; }
    double operator()(double x) const;

    double min() const;
    double max() const;

    /// Requires every sample > 0 (diffusion coefficients).
    void require_positive(const std::string& what) const;

private:
    double period_ = 1.0;
    std::vector<double> samples_;
    std::string label_;
};

/// Field constructed by sampling user data on a uniform grid.
/// Throws on fewer than 8 samples, nonpositive period, or non-finite input.
PeriodicField sample_field(std::span<const double> values_on_grid, double period,
                           std::string label = "");

/// Map a callable f : [0, period) -> R onto n uniform samples.
template <typename F>
PeriodicField sample_function(F&& f, std::size_t n, double period, std::string label = "") {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = f(period * double(j) / double(n));
    return PeriodicField(std::move(s), period, std::move(label));
}

/// Equal-weight periodic trapezoid average over one period.
double mean_arithmetic(const PeriodicField& f);

/// (mean of 1/f)^-1; requires f > 0 everywhere.
double mean_harmonic(const PeriodicField& f);

/// Field of period eps*L whose value at x equals f(x/eps); the per-period
/// sample count is preserved.
PeriodicField make_rapid(const PeriodicField& f, double eps);

/// Centered-difference derivative samples (periodic wrap), same grid.
PeriodicField derivative_centered(const PeriodicField& f);

/// d x d matrix of periodic fields sharing one period (row-major entries).
struct MatrixField {
    int d = 0;
    std::vector<PeriodicField> entries;  // size d*d

    MatrixField() = default;
    MatrixField(int dim, std::vector<PeriodicField> fields);

    static MatrixField constant(int dim, std::span<const double> values, std::size_t n,
                                double period);
    static MatrixField scalar(PeriodicField f);

    double period() const { return entries.empty() ? 1.0 : entries.front().period(); }
    const PeriodicField& entry(int i, int j) const { return entries[std::size_t(i) * d + j]; }
    PeriodicField& entry(int i, int j) { return entries[std::size_t(i) * d + j]; }

    /// Value of entry (i,j) at x.
    double operator()(int i, int j, double x) const { return entry(i, j)(x); }
};

struct StructureFlags {
    bool cooperative = false;
    bool fully_coupled = false;
};

/// Cooperativity: a_ij(x_k) >= 0 at every sample for all i != j.
/// Full coupling: the graph with an edge i->j whenever a_ij has a run of at
/// least `window` consecutive samples all >= nu is strongly connected.
StructureFlags check_structure(const MatrixField& a, double nu = 1e-8, int window = 2);

enum class OperatorForm { divergence, nondivergence };

struct MutationCompetition {
    PeriodicField r_u, r_v, kappa_u, kappa_v, mu_u, mu_v;
};

struct Nonlinearity {
    enum class Kind { linear, mutation_competition, lower_barrier_beta };
    enum class Base { linear, mutation_competition };

    Kind kind = Kind::linear;
    Base base = Base::linear;  // meaningful for lower_barrier_beta
    std::optional<MutationCompetition> mc;
    double beta = 0.0;
};

/// Full problem description: u_t = L u + f(x, u) with L-periodic data.
struct SystemSpec {
    int d = 1;
    double period = 1.0;
    std::vector<PeriodicField> sigma;  // d diffusion fields, > 0
    std::vector<PeriodicField> q;      // d advection fields
    MatrixField a;                     // linearization Df(x, 0)
    OperatorForm form = OperatorForm::divergence;
    Nonlinearity f;

    /// Checks dimensions, shared period, positivity of sigma and of the
    /// mutation model's kappa/mu fields.  Throws on violation.
    void validate() const;

    /// f(x, u) for a state vector u (size d), result written to out.
    void reaction(double x, std::span<const double> u, std::span<double> out) const;
};

/// Linearization matrix of the mutation-competition model,
/// [[r_u - mu_u, mu_v], [mu_u, r_v - mu_v]] on the common grid.
MatrixField mutation_linearization(const MutationCompetition& mc, double period);

/// Convenience builders used by tests, the corpus and the CLI.
SystemSpec make_scalar_spec(PeriodicField sigma, PeriodicField q, PeriodicField r,
                            OperatorForm form = OperatorForm::divergence);
SystemSpec make_scalar_kpp(double sigma, double r, std::size_t n = 64, double period = 1.0);
SystemSpec make_mutation_spec(PeriodicField sigma_u, PeriodicField sigma_v,
                              MutationCompetition mc,
                              OperatorForm form = OperatorForm::divergence);

}  // namespace perwave
