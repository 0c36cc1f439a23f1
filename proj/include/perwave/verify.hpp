#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "perwave/specfile.hpp"

namespace perwave {

struct CheckRecord {
    std::string spec_name;
    std::string check;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckRecord> checks;
    int failures = 0;
};

/// Property suite over one parsed spec: structural flags, Perron residuals,
/// concavity and the quadratic cap, the eigenvalue ordering chain, minimax
/// bounds with seeded random test functions, speed tangency, survival,
/// isotropy and drift ordering (the latter gated by [expect] flags).
void verify_spec(const ParsedSpec& parsed, const std::string& name, std::uint64_t seed,
                 VerifyReport& report, std::ostream& log);

/// Runs verify_spec over every .cfg file in the directory (sorted by name).
VerifyReport verify_corpus(const std::string& corpus_dir, std::uint64_t seed, std::ostream& log);

}  // namespace perwave
