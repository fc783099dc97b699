// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apcircle/arith.hpp"
#include "apcircle/bounds.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/decomposition.hpp"
#include "apcircle/expsums.hpp"
#include "apcircle/rng.hpp"

using namespace apcircle;

namespace {

constexpr std::uint64_t kSeed = 20240607;

struct Outcome {
    bool passed;
    std::string detail;
};

std::int64_t s(std::uint64_t v) { return static_cast<std::int64_t>(v); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::mt19937_64 rng_for(std::uint64_t criterion) {
    std::seed_seq seq{static_cast<std::uint32_t>(kSeed), static_cast<std::uint32_t>(criterion)};
    return std::mt19937_64(seq);
}

Outcome counting_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t mismatches = 0, cases = 0;
    for (std::uint64_t q = 1; q <= 20; ++q)
        for (std::uint64_t x = 0; x <= 200; ++x)
            for (std::uint64_t a = 0; a < q; ++a, ++cases)
                if (counting::count_progression(x, q, s(a)) != counting::count_brute(x, q, s(a))) ++mismatches;
    auto rng = rng_for(1);
    for (int i = 0; i < 300; ++i, ++cases) {
        const std::uint64_t x = uniform_below(rng, 100'001), q = uniform_between(rng, 1, 500);
        const std::int64_t a = s(uniform_below(rng, q));
        if (counting::count_progression(x, q, a) != counting::count_brute(x, q, a)) ++mismatches;
    }
    const double t = seconds_since(start);
    return {mismatches == 0 && t < 60.0,
            std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches, " + num(t) + " s"};
}

Outcome exact_identities() {
    const auto start = std::chrono::steady_clock::now();
    auto rng = rng_for(2);
    double worst = 0.0;
    std::string worst_at;
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t x = uniform_between(rng, 3, 100'000), q = uniform_between(rng, 1, 100);
        const std::int64_t a = s(uniform_below(rng, q));
        const auto rep = decomposition::decompose(x, q, a);
        // Count identities must vanish exactly; real sums relative to their left side.
        const std::pair<const char*, double> scaled[] = {
            {"total_split", 0.0},
            {"quadrant_hyperbola", 0.0},
            {"s1_split", 1e-6 * (1.0 + static_cast<double>(rep.s1))},
            {"s2_split", 1e-6 * (1.0 + static_cast<double>(rep.s2))},
            {"n_zero_half_omega", 1e-6 * (1.0 + std::abs(rep.frak_n0))},
        };
        for (const auto& [label, tol] : scaled) {
            const double r = rep.residuals.at(label);
            const double excess = tol == 0.0 ? (r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : r / tol;
            if (excess > worst) {
                worst = excess;
                worst_at = std::string(label) + " at x=" + std::to_string(x) + " q=" + std::to_string(q);
            }
        }
    }
    const double t = seconds_since(start);
    return {worst <= 1.0 && t < 120.0,
            "worst residual/tolerance " + num(worst) + (worst_at.empty() ? "" : " (" + worst_at + ")") + ", " +
                num(t) + " s"};
}

Outcome gauss_closed_form() {
    const auto start = std::chrono::steady_clock::now();
    auto rng = rng_for(3);
    double worst = 0.0;
    for (std::uint64_t q = 1; q <= 512; ++q) {
        for (int i = 0; i < 200; ++i) {
            const std::int64_t k = s(uniform_below(rng, 4 * q)) - s(2 * q);
            const std::int64_t m = s(uniform_below(rng, 4 * q)) - s(2 * q);
            const double diff = std::abs(expsums::gauss_closed(q, k, m) - expsums::gauss_direct(q, k, m));
            worst = std::max(worst, diff / (1e-8 * (1.0 + std::sqrt(static_cast<double>(q)))));
        }
    }
    const double t = seconds_since(start);
    return {worst <= 1.0 && t < 120.0, "worst error/tolerance " + num(worst) + ", " + num(t) + " s"};
}

Outcome h_fast_path() {
    auto rng = rng_for(4);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t q = uniform_between(rng, 1, 400);
        const expsums::HSumQuery query{q, s(uniform_below(rng, q)), s(uniform_below(rng, q)),
                                       s(uniform_below(rng, q))};
        const double tq = static_cast<double>(arith::tau(q));
        const double diff = std::abs(expsums::h_fast(query) - expsums::h_direct(query));
        worst = std::max(worst, diff / (1e-6 * (1.0 + std::sqrt(static_cast<double>(q)) * tq * tq)));
    }
    std::uint64_t eta_mismatches = 0;
    for (std::uint64_t q = 1; q <= 200; ++q) {
        const counting::SqrtTable table(q);
        for (std::uint64_t a = 0; a < q; ++a) {
            const auto v = expsums::h_fast({q, s(a), 0, 0});
            const auto e = counting::eta(table, s(a));
            if (std::llround(v.real()) != s(e) || std::abs(v.real() - static_cast<double>(e)) > 1e-6 ||
                std::abs(v.imag()) > 1e-6)
                ++eta_mismatches;
        }
    }
    return {worst <= 1.0 && eta_mismatches == 0,
            "worst error/tolerance " + num(worst) + ", zero-frequency mismatches " + std::to_string(eta_mismatches)};
}

// K(q; k, n) for all (k, n), row-major.  Indices advance by the inverse
// table so the inner loop needs no multiplication or division.
std::vector<double> kloosterman_table(std::uint64_t q) {
    std::vector<std::uint64_t> units, inverse;
    for (std::uint64_t alpha = 1; alpha <= q; ++alpha) {
        if (arith::gcd(alpha % q, q) != 1) continue;
        units.push_back(alpha % q);
        inverse.push_back(static_cast<std::uint64_t>(arith::mod_inverse(s(alpha % q), q)));
    }
    std::vector<double> cosine(q);
    for (std::uint64_t r = 0; r < q; ++r) cosine[r] = expsums::unit_root(r, q).real();
    std::vector<double> table(q * q);
    std::vector<std::uint64_t> idx(units.size());
    for (std::uint64_t k = 0; k < q; ++k) {
        for (std::size_t j = 0; j < units.size(); ++j) idx[j] = (k * units[j]) % q;
        for (std::uint64_t n = 0; n < q; ++n) {
            double sum = 0.0;
            for (std::size_t j = 0; j < units.size(); ++j) {
                sum += cosine[idx[j]];
                idx[j] += inverse[j];
                if (idx[j] >= q) idx[j] -= q;
            }
            table[k * q + n] = sum;
        }
    }
    return table;
}

Outcome weil_and_h_bounds() {
    double weil = 0.0, mismatch = 0.0;
    for (std::uint64_t q = 1; q <= 300; ++q) {
        const auto table = kloosterman_table(q);
        for (std::uint64_t k = 0; k < q; ++k)
            for (std::uint64_t n = 0; n < q; ++n)
                weil = std::max(weil, std::abs(table[k * q + n]) / expsums::weil_bound_value(q, s(k), s(n)));
        if (q == 7 || q == 64 || q == 255 || q == 300) {
            for (std::uint64_t k = 0; k < 5; ++k)
                mismatch = std::max(mismatch, std::abs(table[k * q + 3] - expsums::kloosterman_direct(q, s(k), 3).real()));
        }
    }
    auto rng = rng_for(5);
    double full = 0.0, simplified = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t q = uniform_between(rng, 1, 1000);
        const expsums::HSumQuery query{q, s(uniform_below(rng, q)), s(uniform_below(rng, q)),
                                       s(uniform_below(rng, q))};
        const double v = std::abs(expsums::h_fast(query));
        full = std::max(full, v / expsums::h_bound_value(query, expsums::HBoundMode::full));
        simplified = std::max(simplified, v / expsums::h_bound_value(query, expsums::HBoundMode::simplified));
    }
    const double slack_tol = 1.0 + 1e-9;
    return {weil <= slack_tol && mismatch <= 1e-9 && full <= slack_tol && simplified <= slack_tol,
            "max |K|/weil " + num(weil) + ", table/library mismatch " + num(mismatch) + ", max |H|/bound full " + num(full) + " simplified " + num(simplified)};
}

Outcome eta_omega_bounds() {
    double c_eta = 0.0, c_omega = 0.0;
    std::uint64_t row_failures = 0;
    for (std::uint64_t q = 1; q <= 2000; ++q) {
        const counting::SqrtTable table(q);
        const auto row = counting::eta_row(table);
        const double tq = static_cast<double>(arith::tau(q));
        std::uint64_t eta_sum = 0, omega_sum = 0;
        for (std::uint64_t a = 0; a < q; ++a) {
            const auto w = counting::omega(table, s(a));
            eta_sum += row[a];
            omega_sum += w;
            c_eta = std::max(c_eta, static_cast<double>(row[a]) / (static_cast<double>(q) * tq));
            c_omega = std::max(c_omega, static_cast<double>(w) /
                                            (std::sqrt(static_cast<double>(arith::gcd(q, a))) * tq));
        }
        if (q <= 500 && (eta_sum != q * q || omega_sum != q)) ++row_failures;
    }
    return {c_eta <= 4.0 && c_omega <= 4.0 && row_failures == 0,
            "C_eta " + num(c_eta) + ", C_omega " + num(c_omega) + ", row-sum failures " +
                std::to_string(row_failures)};
}

Outcome fourier_truncation() {
    auto rng = rng_for(7);
    constexpr std::int64_t kMaxM = 1024;
    double worst = 0.0;
    double spot = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const double y = uniform_unit(rng) * 8.0 - 4.0;
        const double target = decomposition::rho(y);
        const double frac = y - std::floor(y);
        const double dist = std::min(frac, 1.0 - frac);
        double partial = 0.0;
        for (std::int64_t n = 1; n <= kMaxM; ++n) {
            partial += std::sin(2.0 * std::numbers::pi * static_cast<double>(n) * y) /
                       (std::numbers::pi * static_cast<double>(n));
            if (n < 4) continue;
            const double err = std::abs(target - partial);
            worst = std::max(worst, err * std::max(1.0, static_cast<double>(n) * dist));
        }
        if (i % 1000 == 0)
            spot = std::max(spot, std::abs(partial - decomposition::rho_truncated(y, kMaxM)));
    }
    return {worst <= 2.0 && spot <= 1e-9,
            "C_rho " + num(worst) + ", library/series mismatch " + num(spot)};
}

Outcome gamma_reconstruction() {
    auto rng = rng_for(8);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t x = uniform_between(rng, 3, 10'000), q = uniform_between(rng, 1, 50);
        const std::int64_t a = s(uniform_below(rng, q));
        const auto rep = decomposition::decompose(x, q, a);
        worst = std::max(worst, rep.residuals.at("s1_0_reconstruction") /
                                    (10.0 * rep.quadrature_tol * (1.0 + static_cast<double>(x))));
    }
    return {worst <= 1.0, "worst residual/tolerance " + num(worst)};
}

bounds::SweepConfig regression_grid(unsigned workers) {
    bounds::SweepConfig config;
    config.x_values = {10'000, 100'000, 1'000'000, 10'000'000};
    config.q_rule.kind = bounds::ModulusRule::Kind::log_spaced;
    config.q_rule.count = 8;
    config.a_rule.kind = bounds::ResidueRule::Kind::random;
    config.a_rule.values = {0, 1};
    config.a_rule.count = 1;
    config.a_rule.seed = kSeed;
    config.workers = workers;
    return config;
}

const std::vector<bounds::SweepRecord>& regression_records() {
    static const auto records = bounds::run_sweep(regression_grid(4));
    return records;
}

Outcome regression_sweep() {
    const auto start = std::chrono::steady_clock::now();
    const auto& records = regression_records();
    const auto serial = bounds::run_sweep(regression_grid(1));
    const double t = seconds_since(start);
    const auto report = bounds::report_constants(records);
    const auto& tolev = report.bounds[static_cast<int>(bounds::BoundKind::tolev)];
    bool ok = std::isfinite(tolev.max_ratio) && report.errors == 0 && serial == records;

    double worst_step = 0.0;
    for (std::size_t i = 1; i < tolev.per_decade.size(); ++i) {
        const double lo = std::min(tolev.per_decade[i - 1].second, tolev.per_decade[i].second);
        const double hi = std::max(tolev.per_decade[i - 1].second, tolev.per_decade[i].second);
        worst_step = std::max(worst_step, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    ok = ok && worst_step < 3.0;

    const std::filesystem::path baseline = std::filesystem::path(APCIRCLE_BASELINE_DIR) / "max_ratio_tolev.txt";
    std::string baseline_note;
    if (std::filesystem::exists(baseline)) {
        std::ifstream in(baseline);
        double recorded = 0.0;
        in >> recorded;
        const double drift = std::abs(recorded - tolev.max_ratio) / std::max(1e-300, std::abs(recorded));
        ok = ok && drift <= 1e-12;
        baseline_note = "baseline " + bounds::format_real(recorded) + " drift " + num(drift);
    } else {
        std::ofstream(baseline) << bounds::format_real(tolev.max_ratio) << "\n";
        baseline_note = "baseline recorded";
    }
    ok = ok && t < 600.0;
    std::string decades;
    for (const auto& [d, v] : tolev.per_decade) decades += " 1e" + std::to_string(d) + ":" + num(v);
    return {ok, std::to_string(records.size()) + " cells, max ratio_tolev " + bounds::format_real(tolev.max_ratio) +
                    ", decades" + decades + ", worst decade step " + num(worst_step) + ", " + baseline_note +
                    ", workers 1 vs 4 " + (serial == records ? "identical" : "differ") + ", " + num(t) + " s"};
}

Outcome bound_comparison() {
    std::uint64_t checked = 0, violations = 0, violations_without_tau = 0;
    double worst = 0.0;
    std::string worst_at;
    for (const auto& rec : regression_records()) {
        if (rec.q == 1 || rec.a % rec.q != 1 % rec.q) continue;
        const double xd = static_cast<double>(rec.x);
        if (static_cast<double>(rec.q) > std::pow(xd, 2.0 / 3.0 - 0.05)) continue;
        const auto mid = bounds::bound_varbanets(rec.x, rec.q, s(rec.a), bounds::VarbanetsVariant::mid);
        if (!mid) continue;
        ++checked;
        const double tolev = bounds::bound_tolev(rec.x, rec.q, s(rec.a));
        const double tau4 = std::pow(static_cast<double>(arith::tau(rec.q)), 4);
        if (tolev > *mid) ++violations;
        if (tolev / tau4 > *mid) ++violations_without_tau;
        if (tolev / *mid > worst) {
            worst = tolev / *mid;
            worst_at = "x=" + std::to_string(rec.x) + " q=" + std::to_string(rec.q);
        }
    }
    return {checked > 0 && violations == 0,
            std::to_string(checked) + " applicable cells, " + std::to_string(violations) +
                " with tolev > mid, worst tolev/mid " + num(worst) + (worst_at.empty() ? "" : " at " + worst_at) +
                "; without the tau^4 factor " + std::to_string(violations_without_tau) + " violations"};
}

Outcome performance() {
    auto start = std::chrono::steady_clock::now();
    const auto count = counting::count_progression(10'000'000'000ull, 10'000, 1);
    const double t_count = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto h = expsums::h_fast({999'983, 1, 12345, 678});
    const double t_h = seconds_since(start);
    const bool sane = count.total > 0 && std::isfinite(h.real());
    return {sane && t_count < 5.0 && t_h < 5.0,
            "count_progression(1e10, 1e4) " + num(t_count) + " s, h_fast(999983) " + num(t_h) + " s"};
}

struct Criterion {
    int id;
    const char* description;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "progression count matches brute force", counting_oracle},
        {2, "exact decomposition identities", exact_identities},
        {3, "closed Gauss sum matches direct sum", gauss_closed_form},
        {4, "fast H sum matches direct sum and eta", h_fast_path},
        {5, "Weil and H bounds hold", weil_and_h_bounds},
        {6, "eta and omega bound constants and row sums", eta_omega_bounds},
        {7, "sawtooth Fourier truncation constant", fourier_truncation},
        {8, "first-moment reconstruction with Gamma quadrature", gamma_reconstruction},
        {9, "remainder regression sweep", regression_sweep},
        {10, "tolev bound below the a = 1 mid bound", bound_comparison},
        {11, "single-threaded performance", performance},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0, ran = 0;
    for (const auto& c : criteria()) {
        if (selected != 0 && c.id != selected) continue;
        ++ran;
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.passed) ++failed;
        std::printf("%s criterion %d: %s (%s)\n", outcome.passed ? "PASS" : "FAIL", c.id, c.description,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", selected);
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
