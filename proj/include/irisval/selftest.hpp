#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace irisval {

struct SelftestOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool verbose = false;
    int cases = 200;  // Otsu images and point sets; other checks scale from this
};

struct OracleCheck {
    std::string name;
    int cases = 0;
    int mismatches = 0;
    std::string first_failure;

    bool passed() const { return cases > 0 && mismatches == 0; }
};

// Production implementations versus the brute-force oracles on seeded random
// inputs.
std::vector<OracleCheck> run_oracle_checks(const SelftestOptions& opts);

// Runs the checks and prints one line per check. True when all pass.
bool run_selftest(const SelftestOptions& opts, std::ostream& out);

} // namespace irisval
