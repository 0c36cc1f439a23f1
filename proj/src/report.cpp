#include "perwave/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace perwave {

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

}  // namespace

void write_field_csv(const std::string& path, const PeriodicField& f) {
    auto os = open_out(path);
    os << "x,value\n";
    const std::size_t n = f.size();
    for (std::size_t j = 0; j < n; ++j)
        os << format17(f.period() * double(j) / double(n)) << ',' << format17(f.at(j)) << '\n';
}

void write_kcurve_csv(const std::string& path, const KCurve& curve) {
    auto os = open_out(path);
    os << "lambda,k,residual\n";
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
        os << format17(curve.lambdas[i]) << ',' << format17(curve.values[i]) << ','
           << format17(curve.residuals[i]) << '\n';
}

void write_front_csv(const std::string& path, const FrontTrace& trace) {
    auto os = open_out(path);
    os << "t,front\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << format17(trace.times[i]) << ',' << format17(trace.positions[i]) << '\n';
}

void write_trajectory_csv(const std::string& path, const OdeTrajectory& traj,
                          const Equilibrium* eq, double lyap_k) {
    auto os = open_out(path);
    os << "t,u,v,F_K\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        double f = 0.0;
        if (eq && traj.u[i] > 0.0 && traj.v[i] > 0.0)
            f = lyapunov_value(lyap_k, *eq, traj.u[i], traj.v[i]);
        os << format17(traj.t[i]) << ',' << format17(traj.u[i]) << ',' << format17(traj.v[i])
           << ',' << format17(f) << '\n';
    }
}

void write_wave_csv(const std::string& path, const WaveProfile& wave) {
    auto os = open_out(path);
    const int n = int(wave.x.size());
    const int d = n > 0 ? int(wave.profile.size()) / n : 0;
    os << "x";
    for (int i = 0; i < d; ++i) os << ",u_" << i + 1 << ",lower_" << i + 1 << ",upper_" << i + 1;
    os << '\n';
    for (int j = 0; j < n; ++j) {
        os << format17(wave.x[std::size_t(j)]);
        for (int i = 0; i < d; ++i)
            os << ',' << format17(wave.profile[std::size_t(i) * n + j]) << ','
               << format17(wave.lower[std::size_t(i) * n + j]) << ','
               << format17(wave.upper[std::size_t(i) * n + j]);
        os << '\n';
    }
}

void write_snapshot_csv(const std::string& path, const SimState& state, double x_min, double h) {
    auto os = open_out(path);
    os << "x";
    for (int i = 0; i < state.d; ++i) os << ",u_" << i + 1;
    os << '\n';
    for (int j = 0; j < state.n_x; ++j) {
        os << format17(x_min + h * j);
        for (int i = 0; i < state.d; ++i)
            os << ',' << format17(state.u[std::size_t(i) * state.n_x + j]);
        os << '\n';
    }
}

void write_sweep_csv(const std::string& path, const SweepTable& table,
                     const std::string& spec_hash, int grid_n, double tol) {
    auto os = open_out(path);
    os << "# quantity=" << table.quantity << '\n';
    os << "# spec_hash=" << spec_hash << '\n';
    os << "# grid_n=" << grid_n << '\n';
    os << "# tol=" << format17(tol) << '\n';
    os << "# reference=" << format17(table.reference) << '\n';
    os << "param,value,reference,error,grid_n,ok,note\n";
    for (const auto& row : table.rows)
        os << format17(row.param) << ',' << format17(row.value) << ',' << format17(row.reference)
           << ',' << format17(row.error) << ',' << row.grid_n << ',' << (row.ok ? 1 : 0) << ','
           << row.note << '\n';
}

}  // namespace perwave
