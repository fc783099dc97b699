#pragma once

/**
 * @file bounds.hpp
 * @brief Published remainder bounds, the sweep engine and constant reports.
 *
 * Every bound is written with its implied constant set to 1.  x^eps factors
 * in the a = 1 bounds are realized as ln^4 x so that all four bounds share a
 * comparison footing; ratios |R| / bound are only meaningful under that
 * convention.
 */

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace apcircle::bounds {

enum class VarbanetsVariant { mid, strong };

/// (q^{1/2} + x^{1/3}) (a, q)^{1/2} tau^4(q) ln^4 x.  Throws DomainError for x < 3.
double bound_tolev(std::uint64_t x, std::uint64_t q, std::int64_t a);

/// x^{2/3 + xi} q^{-(1 + 3 xi)/2} (q, a)^{1/2} tau(q), 0 < xi < 1/3.
double bound_smith(std::uint64_t x, std::uint64_t q, std::int64_t a, double xi);

/// nullopt when the variant's validity conditions fail (a != 1 (mod q), or
/// q outside the admissible range, or q^{1/4} <= rad(q) for strong).
std::optional<double> bound_varbanets(std::uint64_t x, std::uint64_t q, std::int64_t a,
                                      VarbanetsVariant variant);

/// q <= x^{2/3}, decided in integers.
bool nontrivial_regime(std::uint64_t x, std::uint64_t q);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct ModulusRule {
    enum class Kind { explicit_list, powers_of_two, random, log_spaced };
    Kind kind = Kind::explicit_list;
    std::vector<std::uint64_t> values;  // explicit_list
    std::uint64_t count = 0;            // random, log_spaced
    std::optional<std::uint64_t> seed;  // random
};

struct ResidueRule {
    enum class Kind { fixed, all, random };
    Kind kind = Kind::fixed;
    std::vector<std::int64_t> values;   // fixed; also prepended for random
    std::uint64_t count = 0;            // random draws per (x, q)
    std::optional<std::uint64_t> seed;  // random
};

struct SweepConfig {
    std::vector<std::uint64_t> x_values;
    ModulusRule q_rule;
    ResidueRule a_rule;
    double smith_xi = 0.25;
    unsigned workers = 1;
    std::string output_path;  // empty: no CSV
};

/// Throws DomainError when an invariant of the config fails.
void validate(const SweepConfig& config);

inline constexpr double kInapplicable = std::numeric_limits<double>::infinity();

enum class BoundKind { tolev = 0, smith = 1, v_mid = 2, v_strong = 3 };
inline constexpr std::array<const char*, 4> kBoundNames = {"tolev", "smith", "v_mid", "v_strong"};

struct SweepRecord {
    std::uint64_t x = 0;
    std::uint64_t q = 1;
    std::uint64_t a = 0;
    std::uint64_t s_total = 0;
    std::uint64_t quadrant = 0;
    std::uint64_t axis = 0;
    std::uint64_t origin = 0;
    std::uint64_t eta = 0;
    std::uint64_t omega = 0;
    double main = 0.0;
    double r = 0.0;
    /// Indexed by BoundKind; kInapplicable when a bound does not apply.
    std::array<double, 4> bound{kInapplicable, kInapplicable, kInapplicable, kInapplicable};
    /// |r| / bound, 0 when the bound does not apply.
    std::array<double, 4> ratio{0.0, 0.0, 0.0, 0.0};
    bool nontrivial = true;
    std::string error;  // empty on success

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// All (x, q, a) cells of the grid, sorted and deduplicated.
struct Cell {
    std::uint64_t x;
    std::uint64_t q;
    std::uint64_t a;
    auto operator<=>(const Cell&) const = default;
};
std::vector<Cell> expand_grid(const SweepConfig& config);

/// One record; errors are captured in the record, never thrown.
SweepRecord evaluate_cell(const Cell& cell, double smith_xi);

/// Records sorted by (x, q, a) whatever the scheduling; writes the CSV
/// atomically when output_path is set.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "x,q,a,s_total,quadrant,axis,origin,eta,omega,main,r,bound_tolev,ratio_tolev,"
    "bound_smith,ratio_smith,bound_v_mid,ratio_v_mid,bound_v_strong,ratio_v_strong,regime,error";

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// Temp file + rename.
void write_csv_file(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);
std::vector<SweepRecord> read_csv_file(const std::string& path);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

// ---------------------------------------------------------------------------
// Constant reports
// ---------------------------------------------------------------------------

struct BoundSummary {
    double max_ratio = 0.0;
    std::optional<Cell> argmax;
    std::uint64_t applicable = 0;
    /// decade floor(log10 x) -> max ratio in that decade
    std::vector<std::pair<int, double>> per_decade;
};

struct ConstantsReport {
    std::array<BoundSummary, 4> bounds;
    std::uint64_t records = 0;
    std::uint64_t errors = 0;
};

/// Throws EmptyInput for an empty record list.
ConstantsReport report_constants(const std::vector<SweepRecord>& records);

void print_report(std::ostream& out, const ConstantsReport& report);

}  // namespace apcircle::bounds
