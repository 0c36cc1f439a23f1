#pragma once

#include <cstdint>
#include <string>

#include "perwave/field.hpp"
#include "perwave/homogexp.hpp"
#include "perwave/ode.hpp"
#include "perwave/pde.hpp"
#include "perwave/spectral.hpp"

namespace perwave {

/// Fixed 17-significant-digit decimal rendering (%.17g).
std::string format17(double v);

/// FNV-1a 64-bit hash, hex encoded; used to stamp spec files into reports.
std::string fnv1a64_hex(const std::string& data);

void write_field_csv(const std::string& path, const PeriodicField& f);
void write_kcurve_csv(const std::string& path, const KCurve& curve);
void write_front_csv(const std::string& path, const FrontTrace& trace);
void write_trajectory_csv(const std::string& path, const OdeTrajectory& traj,
                          const Equilibrium* eq, double lyap_k);
void write_wave_csv(const std::string& path, const WaveProfile& wave);
void write_snapshot_csv(const std::string& path, const SimState& state, double x_min, double h);
void write_sweep_csv(const std::string& path, const SweepTable& table,
                     const std::string& spec_hash, int grid_n, double tol);

}  // namespace perwave
