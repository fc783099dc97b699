#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: argument parsing into typed commands and
 * their execution.  Output is one "key: value" pair per line on stdout,
 * reals with 17 significant digits; diagnostics go to stderr.
 *
 * Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "apcircle/bounds.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/decomposition.hpp"
#include "apcircle/expsums.hpp"

namespace apcircle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct CountArgs {
    std::uint64_t x = 0;
    std::uint64_t q = 1;
    std::int64_t a = 0;
};

struct EtaArgs {
    std::uint64_t q = 1;
    std::int64_t a = 0;
    counting::EtaMethod method = counting::EtaMethod::convolution;
};

struct OmegaArgs {
    std::uint64_t q = 1;
    std::int64_t a = 0;
};

struct GaussArgs {
    std::uint64_t q = 1;
    std::int64_t k = 0;
    std::int64_t m = 0;
    bool direct = false;
};

struct KloostermanArgs {
    std::uint64_t q = 1;
    std::int64_t k = 0;
    std::int64_t n = 0;
};

struct HsumArgs {
    expsums::HSumQuery query{1, 0, 0, 0};
    expsums::HBoundMode mode = expsums::HBoundMode::full;
    bool direct = false;
};

struct DecomposeArgs {
    std::uint64_t x = 0;
    std::uint64_t q = 1;
    std::int64_t a = 0;
    decomposition::DecomposeOptions options;
};

struct VerifyArgs {
    std::string module;  // a module name or "all"
};

struct SweepArgs {
    bounds::SweepConfig config;
};

struct ReportArgs {
    std::string input;  // CSV written by sweep
};

using CommandArgs = std::variant<CountArgs, EtaArgs, OmegaArgs, GaussArgs, KloostermanArgs, HsumArgs,
                                 DecomposeArgs, VerifyArgs, SweepArgs, ReportArgs>;

struct CommandSpec {
    std::string subcommand;
    CommandArgs args;
    std::optional<std::uint64_t> seed;
};

/// Thrown by parse_args for --help; carries the text to print.
struct HelpRequested {
    std::string text;
};

/// argv without the program name.  Throws UsageError naming the bad flag.
CommandSpec parse_args(const std::vector<std::string>& argv);

/// Flat JSON keys: x_values, q_rule, q_values, q_count, q_seed, a_rule,
/// a_values, a_count, a_seed, smith_xi, workers, output_path.
/// Throws UsageError.
bounds::SweepConfig sweep_config_from_json(const std::string& text, unsigned default_workers);

/// --workers default: APCIRCLE_WORKERS when set, else the hardware count.
unsigned default_workers();

int run(const CommandSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + run with every error mapped to its exit code.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace apcircle::cli
