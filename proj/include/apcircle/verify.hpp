#pragma once

/**
 * @file verify.hpp
 * @brief Self-contained property suites, one per module, for the CLI's
 * verify command.  Each suite is a scaled-down version of the unit and
 * acceptance checks so it finishes in seconds.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace apcircle::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // worst observed value or first counterexample
};

struct SuiteResult {
    std::string module;
    std::vector<CheckResult> checks;

    std::size_t passed() const;
    std::size_t failed() const;
};

/// arith, expsums, counting, decomposition, bounds.
const std::vector<std::string>& module_names();

/// Throws UsageError for an unknown module name.
SuiteResult run_suite(const std::string& module, std::uint64_t seed);

}  // namespace apcircle::verify
