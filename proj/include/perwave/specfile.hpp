#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "perwave/field.hpp"

namespace perwave {

/// Run-wide settings shared by every subcommand (flags win over the
/// PERWAVE_* environment mirrors, which win over defaults).
struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::string out_dir = ".";
    int grid_n = 128;
    double tol = 1e-8;
    int workers = 1;
    std::uint64_t seed = 20240901;
};

struct ParsedSpec {
    SystemSpec spec;
    std::optional<PeriodicField> p;  // [strong_coupling] proportion field
    double epsilon = 0.0;            // [strong_coupling] epsilon, 0 when absent
    std::map<std::string, double> numerics;
    std::map<std::string, bool> expectations;  // [expect] section, for `verify`
    std::string hash;                          // FNV-1a of the file contents
    std::string source_path;

    double numeric(const std::string& key, double fallback) const {
        auto it = numerics.find(key);
        return it == numerics.end() ? fallback : it->second;
    }
};

/// Flat INI-style config: [system], [coefficients], [nonlinearity],
/// [numerics], optional [strong_coupling] and [expect].  Coefficient values
/// are expressions in x or csv:<path> references (two columns: x, value).
/// Errors carry file name and line number; assumption violations name the
/// failing sample.
ParsedSpec parse_spec(const std::string& path);

}  // namespace perwave
